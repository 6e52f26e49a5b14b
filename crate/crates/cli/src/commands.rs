use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use falsilab::falsify::{falsifiable_at, forbidden_configurations, refute, relative_falsifiability_at, ClassSpec, Falsifiability, ObservationSet, Verdict};
use falsilab::fitness::{check_fg_fit, check_fit, synthesize_chi, synthesize_psi};
use falsilab::fraisse::{check_fraisse, generic_chain, time_indexed_theory};
use falsilab::logic::{classify_syntax, parse_formula, parse_formula_infer, parse_partitioned, satisfies};
use falsilab::shell::{corpus, free_particle_refute, make_gn, read_rational_table, Format, Observation, RunConfig};
use falsilab::sigstruct::text::{parse_document, parse_signature};
use falsilab::stochastic::{
    product_chain, realization_probability, simulate, stationary, MarkovSpec, Mode, Realization, RealizationConfig,
};
use falsilab::vc::{parametric_vc_lower_bound, vc_dimension, vc_sentence, ParametricFamily, VcDimension};
use falsilab::{Limits, Signature, Structure, Theory};

use crate::args::{ClassArg, Cli, Command, CorpusCommand, MarkovCommand, ModeArg};
use crate::output::Outcome;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Writes `text` and notes the path in the report.
fn write_output(path: Option<&Path>, text: &str, outcome: &mut Outcome) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
        outcome.result["output"] = json!(p.display().to_string());
        let _ = writeln!(outcome.text, "wrote {}", p.display());
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn structure_file(path: &Path) -> Result<Structure> {
    let doc = parse_document(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    Ok(doc.only_structure()?.clone())
}

fn load_class(arg: &ClassArg) -> Result<ClassSpec> {
    if let Some(p) = &arg.class {
        return ClassSpec::load(p).with_context(|| format!("loading class {}", p.display()));
    }
    if let Some(p) = &arg.theory {
        return Ok(ClassSpec::intensional(Theory::load(p).with_context(|| format!("loading theory {}", p.display()))?));
    }
    let sig = parse_signature(arg.tau.as_deref().unwrap_or_default())?;
    Ok(ClassSpec::intensional(time_indexed_theory(&sig, false)?))
}

fn signature(text: Option<&str>) -> Result<Option<Signature>> {
    Ok(match text {
        Some(t) => Some(parse_signature(t)?),
        None => None,
    })
}

fn config(cli: &Cli) -> Result<RunConfig> {
    let mut limits = Limits::default();
    if let Some(b) = cli.budget {
        limits = limits.with_enumeration(b);
    }
    let cfg = RunConfig { limits, seed: cli.seed, format: if cli.json { Format::Json } else { Format::Text } };
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = config(cli)?;
    let limits = &cfg.limits;
    Ok(match &cli.command {
        Command::Classify { phi, sig } => {
            let f = match signature(sig.as_deref())? {
                Some(s) => parse_formula(phi, &s)?,
                None => parse_formula_infer(phi, "inferred")?.0,
            };
            let c = classify_syntax(&f)?;
            let text = format!(
                "sentence: {f}\nuniversal={}\nuncaf={}\nexistential={}\nquantifier_free={}\nprenex={}\n",
                c.universal, c.uncaf, c.existential, c.quantifier_free, c.prenex
            );
            Outcome::new("classify", json!({ "sentence": f.to_string(), "class": to_json(&c) }), text)
        }
        Command::Eval { structure, phi } => {
            let m = structure_file(structure)?;
            let f = parse_formula(phi, m.signature())?;
            let holds = satisfies(&m, &f)?;
            Outcome::new("eval", json!({ "sentence": f.to_string(), "holds": holds }), format!("{holds}\n")).negative(!holds)
        }
        Command::Forbid { class, n, relative_to } => {
            let k = load_class(class)?;
            let set = forbidden_configurations(&k, *n, limits)?;
            let verdict = falsifiable_at(&k, *n, limits)?;
            let mut text = format!("class {} at n = {n}: {} forbidden diagram(s)\n", k.name, set.len());
            for d in &set.diagrams {
                let _ = writeln!(text, "  {d}");
            }
            let _ = writeln!(
                text,
                "{}",
                match &verdict {
                    Falsifiability::Falsifiable { .. } => "falsifiable".to_string(),
                    Falsifiability::NotFalsifiableAtScale => "not falsifiable at this scale".to_string(),
                }
            );
            let mut result = json!({ "class": k.name, "n": n, "diagrams": set.diagrams.iter().map(|d| d.to_string()).collect::<Vec<_>>(), "falsifiable": verdict.is_falsifiable() });
            if let Some(p) = relative_to {
                let sup = ClassSpec::load(p)?;
                let rel = relative_falsifiability_at(&k, &sup, *n, limits)?;
                let _ = writeln!(
                    text,
                    "relative to {}: {}",
                    sup.name,
                    match &rel.witness {
                        Some(w) => format!("relatively falsifiable, witness {w}"),
                        None => "not relatively falsifiable at this scale".into(),
                    }
                );
                result["relative"] = json!({ "superclass": sup.name, "relatively_falsifiable": rel.relatively_falsifiable, "witness": rel.witness.map(|w| w.to_string()) });
            }
            Outcome::new("forbid", result, text)
        }
        Command::Refute { theory, observations } => {
            let t = Theory::load(theory)?;
            let obs = ObservationSet::parse(&read(observations)?)?;
            let r = refute(&t, &obs)?;
            let mut text = format!("verdict: {}\n", r.verdict);
            if let (Some(s), Some(sub)) = (&r.witness_sentence, &r.substitution) {
                let pairs: Vec<String> = sub.iter().map(|(v, c)| format!("{v}->{c}")).collect();
                let _ = writeln!(text, "witness: {s}\nsubstitution: {}", pairs.join(", "));
            }
            Outcome::new("refute", to_json(&r), text).negative(r.verdict == Verdict::Refuted)
        }
        Command::Fit { class, bound, fg } => {
            let k = load_class(class)?;
            let r = if *fg { check_fg_fit(&k, *bound, limits)? } else { check_fit(&k, *bound, limits)? };
            let mut text = format!(
                "class {} up to {bound}: {}\nnontrivial={}\nfinitely_testable={}\nirrevocably_testable={}\n",
                k.name,
                if r.is_fit() { "FIT" } else { "not FIT" },
                r.nontrivial,
                r.finitely_testable,
                r.irrevocably_testable
            );
            if let Some(w) = &r.irrevocability_counterexample {
                let _ = writeln!(text, "irrevocability counterexample: {} with substructure on {:?}", w.member.to_text("M"), w.substructure);
            }
            for m in &r.vacuous_substructure_warning {
                let _ = writeln!(text, "warning: no proper substructure: {}", m.to_text("M"));
            }
            Outcome::new("fit", to_json(&r), text).negative(!r.is_fit())
        }
        Command::SynthPsi { class, n, output } => {
            let k = load_class(class)?;
            let f = synthesize_psi(&k, *n, limits)?;
            let mut out = Outcome::new("synth-psi", json!({ "class": k.name, "n": n, "formula": f.to_string() }), format!("{f}\n"));
            write_output(output.as_deref(), &format!("{}\n{f}\n", k.signature()), &mut out)?;
            out
        }
        Command::SynthChi { sig, n } => {
            let s = parse_signature(sig)?;
            let f = synthesize_chi(&s, *n)?;
            Outcome::new("synth-chi", json!({ "n": n, "formula": f.to_string() }), format!("{f}\n"))
        }
        Command::Vc { structure, phi, cap } => {
            let m = structure_file(structure)?;
            let (pf, _) = parse_partitioned(phi, Some(m.signature()))?;
            let d = vc_dimension(&m, &pf, *cap, limits)?;
            let (kind, witness) = match &d {
                VcDimension::Exact { witness, .. } => ("exact", witness),
                VcDimension::AtLeast { witness, .. } => ("at least", witness),
            };
            let names: Vec<String> = witness.iter().map(|t| t.iter().map(|&e| m.name(e)).collect::<Vec<_>>().join(",")).collect();
            let text = format!("{kind} {}\nshattered: {{{}}}\n", d.value(), names.join("; "));
            Outcome::new("vc", json!({ "formula": pf.to_string(), "exact": d.is_exact(), "value": d.value(), "witness": names }), text)
        }
        Command::VcSentence { phi, n, sig, output } => {
            let s = signature(sig.as_deref())?;
            let (pf, inferred) = parse_partitioned(phi, s.as_ref())?;
            let f = vc_sentence(&pf, *n)?;
            let mut out = Outcome::new("vc-sentence", json!({ "formula": pf.to_string(), "n": n, "sentence": f.to_string() }), format!("{f}\n"));
            write_output(output.as_deref(), &format!("{inferred}\n{f}\n"), &mut out)?;
            out
        }
        Command::VcParam { family, points, grid } => {
            let fam = ParametricFamily::by_name(family)?;
            let pts = read_rational_table(&read(points)?)?;
            let grid = read_rational_table(&read(grid)?)?;
            let b = parametric_vc_lower_bound(&fam, &pts, &grid, limits)?;
            let text = format!("lower bound {}\nshattered points: {:?}\nparameters: {:?}\n", b.lower_bound, b.shattered, b.params);
            Outcome::new("vc-param", json!({ "family": fam.name, "bound": to_json(&b) }), text)
        }
        Command::Fraisse { class, bound, strong } => {
            let k = load_class(class)?;
            let r = check_fraisse(&k, *bound, *strong, limits)?;
            let mut text = format!("class {} up to {bound}{}\n", k.name, if *strong { " (strong amalgamation)" } else { "" });
            let _ = writeln!(text, "HP:  {} ({} checked)", r.hp.holds, r.hp.checked);
            if let Some(w) = &r.hp.counterexample {
                let _ = writeln!(text, "  {} has substructure {} outside the class", w.member.to_text("M"), w.substructure().to_text("N"));
            }
            let _ = writeln!(text, "JEP: {} ({} checked)", r.jep.holds, r.jep.checked);
            if let Some(w) = &r.jep.counterexample {
                let _ = writeln!(text, "  no joint extension up to {} of {} and {}", w.searched_up_to, w.m.to_text("M"), w.n.to_text("N"));
            }
            let _ = writeln!(text, "AP:  {} ({} checked)", r.ap.holds, r.ap.checked);
            if let Some(w) = &r.ap.counterexample {
                let _ = writeln!(text, "  no amalgam for\n{w}");
            }
            let _ = writeln!(text, "{}", if r.is_fraisse() { "Fraïssé up to the bound" } else { "not a Fraïssé class" });
            Outcome::new("fraisse", to_json(&r), text).negative(!r.is_fraisse())
        }
        Command::Generic { class, level, max_size, output } => {
            let k = load_class(class)?;
            let mut l = limits.clone();
            if let Some(s) = max_size {
                l.chain_size = *s;
            }
            let seed = cfg.sub_seed("generic");
            let c = generic_chain(&k, *level, seed, &l)?;
            let text = format!(
                "size {}\nsaturated to level {} of {}\nseed {}\n{}\n",
                c.structure.size(),
                c.saturated,
                c.level,
                c.seed,
                c.structure.to_text("generic")
            );
            let mut out = Outcome::new("generic", to_json(&c), text);
            write_output(output.as_deref(), &format!("{}\n{}\n", c.structure.signature(), c.structure.to_text("generic")), &mut out)?;
            out
        }
        Command::Markov { command } => markov(command, &cfg)?,
        Command::Corpus { command } => match command {
            CorpusCommand::List => {
                let entries = corpus();
                let mut text = String::new();
                for e in &entries {
                    let _ = writeln!(text, "{}: {} ({} checks; files {})", e.name, e.signature, e.expectations.len(), e.files.join(", "));
                }
                let list: Vec<Value> = entries.iter().map(|e| json!({ "name": e.name, "signature": e.signature, "files": e.files, "checks": e.expectations.len() })).collect();
                Outcome::new("corpus list", json!(list), text)
            }
            CorpusCommand::Verify { entry } => {
                let entries: Vec<_> = corpus().into_iter().filter(|e| entry.as_deref().is_none_or(|n| n == e.name)).collect();
                if entries.is_empty() {
                    bail!("no corpus entry named `{}`", entry.as_deref().unwrap_or_default());
                }
                let mut outcomes = Vec::new();
                let mut text = String::new();
                for e in &entries {
                    for o in e.verify(limits) {
                        let _ = writeln!(
                            text,
                            "[{}] {} :: {} = {} (basis: {}){}",
                            if o.ok { "ok" } else { "FAIL" },
                            o.entry,
                            o.what,
                            o.expected,
                            o.basis,
                            if o.ok { String::new() } else { format!(", got {}", o.actual) }
                        );
                        outcomes.push(o);
                    }
                }
                let failed = outcomes.iter().filter(|o| !o.ok).count();
                let _ = writeln!(text, "{} checks, {failed} failed", outcomes.len());
                let mut out = Outcome::new("corpus verify", json!({ "checks": to_json(&outcomes), "failed": failed }), text).negative(failed > 0);
                out.always_fail = true;
                out
            }
        },
        Command::Gn { n } => {
            let g = make_gn(*n)?;
            let text = format!("{}\n{}\n", g.signature(), g.to_text(&format!("g{n}")));
            Outcome::new("gn", json!({ "n": n, "vertices": g.size(), "edges": g.relation_tuples(0).len(), "structure": g.to_text(&format!("g{n}")) }), text)
        }
        Command::Particle { observations } => {
            let rows = read_rational_table(&read(observations)?)?;
            let mut obs = Vec::new();
            for (i, r) in rows.into_iter().enumerate() {
                let Ok([t, x, y, z]) = <[_; 4]>::try_from(r) else { bail!("row {}: expected columns t,x,y,z", i + 1) };
                obs.push(Observation::new(t, [x, y, z]));
            }
            let r = free_particle_refute(&obs)?;
            let mut text = format!("verdict: {}\n", r.verdict);
            if let Some(i) = r.refuted_at {
                let _ = writeln!(text, "observation {} is off the line through observations {} and {}", i + 1, 1, r.line.map_or(0, |l| l.1 + 1));
            }
            Outcome::new("particle", to_json(&r), text).negative(r.verdict == Verdict::Refuted)
        }
    })
}

fn load_chain(path: &Path, limits: &Limits) -> Result<MarkovSpec> {
    MarkovSpec::from_json(&read(path)?, limits).with_context(|| format!("loading chain {}", path.display()))
}

fn markov(command: &MarkovCommand, cfg: &RunConfig) -> Result<Outcome> {
    let limits = &cfg.limits;
    Ok(match command {
        MarkovCommand::Stationary { chain } => {
            let spec = load_chain(chain, limits)?;
            let eta = stationary(&spec.rho)?;
            Outcome::new("markov stationary", json!({ "states": spec.space.len(), "stationary": to_json(&eta) }), format!("{eta}\n"))
        }
        MarkovCommand::Simulate { chain, horizon } => {
            let spec = load_chain(chain, limits)?;
            let run = simulate(&spec.mu, &spec.rho, *horizon, cfg.sub_seed("markov"))?;
            let m = run.to_structure(&spec.space)?;
            let text = format!(
                "generator {} seed {}\nstates {:?}\n{}\n{}\n",
                run.generator,
                run.seed,
                run.states,
                m.signature(),
                m.to_text("run")
            );
            Outcome::new("markov simulate", json!({ "trajectory": to_json(&run), "structure": m.to_text("run") }), text)
        }
        MarkovCommand::Realize { chain, config, horizon, mode, trials } => {
            let spec = load_chain(chain, limits)?;
            let cfg_text = read(config)?;
            let rc = RealizationConfig::from_json(&cfg_text, &spec.space)?;
            let mode = match mode {
                ModeArg::Exact => Mode::Exact,
                ModeArg::Montecarlo => Mode::MonteCarlo { trials: *trials, seed: cfg.sub_seed("markov") },
            };
            let r = realization_probability(&rc, &spec.space, &spec.mu, &spec.rho, *horizon, mode, limits)?;
            let text = match &r {
                Realization::Exact { probability } => format!("{probability}\n"),
                Realization::MonteCarlo { estimate, std_error, hits, trials, seed } => {
                    format!("{estimate} ± {std_error} ({hits} of {trials} trials, seed {seed})\n")
                }
            };
            let times = rc.minimal_times();
            Outcome::new("markov realize", json!({ "horizon": horizon, "minimal_times": times, "realization": to_json(&r) }), text)
        }
        MarkovCommand::Product { chain, times } => {
            let spec = load_chain(chain, limits)?;
            let (mu, rho) = product_chain(&spec.mu, &spec.rho, times, limits)?;
            let mut text = format!("mu* = {mu}\nrho* =\n");
            for i in 0..rho.len() {
                let row: Vec<String> = rho.row(i).iter().map(|x| x.to_string()).collect();
                let _ = writeln!(text, "  {}", row.join(" "));
            }
            Outcome::new("markov product", json!({ "times": times, "mu": to_json(&mu), "rho": to_json(&rho) }), text)
        }
    })
}
