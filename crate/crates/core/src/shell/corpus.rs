//! The worked examples, each with expected values that `corpus verify`
//! recomputes through the public operations.

use std::fmt;

use num_rational::BigRational;
use serde::Serialize;

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::falsify::{falsifiable_at, forbidden_configurations, refute, ClassSpec, ObservationSet};
use crate::fitness::{check_fit, synthesize_psi};
use crate::fraisse::{check_ap, check_fraisse, check_hp, time_indexed_theory};
use crate::logic::{classify_syntax, conj, parse_partitioned, satisfies, Theory};
use crate::sigstruct::text::parse_document;
use crate::sigstruct::{enumerate_structures, Structure};
use crate::stochastic::{realization_probability, simulate, stationary, MarkovSpec, Mode, Realization, RealizationConfig};
use crate::vc::{parametric_vc_lower_bound, vc_dimension, vc_sentence, ParametricFamily};

use super::particle::{free_particle_refute, Observation};
use super::{make_gn, read_rational_table};

pub(crate) const ACYCLIC: &str = include_str!("../../../../corpus/acyclic.fot");
pub(crate) const PREFERENCE: &str = include_str!("../../../../corpus/preference.fot");
pub(crate) const SWAN: &str = include_str!("../../../../corpus/swan.fot");
pub(crate) const SWAN_OBS: &str = include_str!("../../../../corpus/swan_obs.txt");
pub(crate) const CYCLE_OBS: &str = include_str!("../../../../corpus/cycle_obs.txt");
pub(crate) const PATH_OBS: &str = include_str!("../../../../corpus/path_obs.txt");
pub(crate) const DIGRAPHS: &str = include_str!("../../../../corpus/digraphs.class");
pub(crate) const LINEAR_ORDERS: &str = include_str!("../../../../corpus/linear_orders.class");
pub(crate) const SHORT_ORDERS: &str = include_str!("../../../../corpus/short_orders.class");
pub(crate) const THREE_CHAIN: &str = include_str!("../../../../corpus/three_chain.class");
pub(crate) const THREE_CYCLE: &str = include_str!("../../../../corpus/three_cycle.struct");
pub(crate) const COIN: &str = include_str!("../../../../corpus/coin.json");
pub(crate) const SKEW: &str = include_str!("../../../../corpus/skew.json");
pub(crate) const HEADS: &str = include_str!("../../../../corpus/heads.json");
pub(crate) const HEADS_THEN_TAILS: &str = include_str!("../../../../corpus/heads_then_tails.json");
pub(crate) const SAME_TIME: &str = include_str!("../../../../corpus/same_time.json");
pub(crate) const PARTICLE_LINE: &str = include_str!("../../../../corpus/particle_line.csv");
pub(crate) const PARTICLE_BENT: &str = include_str!("../../../../corpus/particle_bent.csv");
pub(crate) const TRIANGLE: &str = include_str!("../../../../corpus/triangle.csv");
pub(crate) const FATLINE_GRID: &str = include_str!("../../../../corpus/fatline_grid.csv");
pub(crate) const LINE_GRID: &str = include_str!("../../../../corpus/line_grid.csv");

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// Stated in the reference text.
    Reference,
    /// Immediate from the definitions.
    Definition,
    /// Computed by an independent brute-force check.
    Oracle,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Reference => "reference",
            Basis::Definition => "definition",
            Basis::Oracle => "oracle",
        })
    }
}

type Probe = fn(&Limits) -> Result<String>;

/// One expected result and the computation that reproduces it.
#[derive(Clone)]
pub struct Expectation {
    pub what: &'static str,
    pub basis: Basis,
    pub expected: &'static str,
    probe: Probe,
}

impl fmt::Debug for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expectation({} = {} [{}])", self.what, self.expected, self.basis)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub entry: &'static str,
    pub what: &'static str,
    pub basis: Basis,
    pub expected: &'static str,
    pub actual: String,
    pub ok: bool,
}

/// A worked example: its signature, the corpus files it draws on, and its
/// expected results.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub signature: &'static str,
    pub files: &'static [&'static str],
    pub expectations: Vec<Expectation>,
}

impl CorpusEntry {
    pub fn verify(&self, limits: &Limits) -> Vec<CheckOutcome> {
        self.expectations
            .iter()
            .map(|e| {
                let actual = (e.probe)(limits).unwrap_or_else(|err| format!("error: {err}"));
                CheckOutcome { entry: self.name, what: e.what, basis: e.basis, expected: e.expected, ok: actual == e.expected, actual }
            })
            .collect()
    }
}

fn ex(what: &'static str, basis: Basis, expected: &'static str, probe: Probe) -> Expectation {
    Expectation { what, basis, expected, probe }
}

fn theory(name: &str, text: &str) -> Result<Theory> {
    Theory::parse(name, text)
}

fn sentence(t: &Theory, i: usize) -> Result<&crate::logic::Formula> {
    t.sentences.get(i).ok_or_else(|| Error::Invalid(format!("theory `{}` has no sentence {i}", t.name)))
}

fn acyclic() -> Result<ClassSpec> {
    Ok(ClassSpec::intensional(theory("acyclic", ACYCLIC)?))
}

fn classified(f: &crate::logic::Formula) -> Result<String> {
    let c = classify_syntax(f)?;
    Ok(format!("universal={} uncaf={}", c.universal, c.uncaf))
}

fn structure(text: &str) -> Result<Structure> {
    Ok(parse_document(text)?.only_structure()?.clone())
}

fn chain(text: &str, limits: &Limits) -> Result<MarkovSpec> {
    MarkovSpec::from_json(text, limits)
}

fn realized(chain_text: &str, config: &str, horizon: usize, mode: Mode, limits: &Limits) -> Result<Realization> {
    let spec = chain(chain_text, limits)?;
    let cfg = RealizationConfig::from_json(config, &spec.space)?;
    realization_probability(&cfg, &spec.space, &spec.mu, &spec.rho, horizon, mode, limits)
}

fn particle(csv: &str) -> Result<String> {
    let rows = read_rational_table(csv)?;
    let obs: Vec<Observation> = rows
        .into_iter()
        .map(|r| match <[BigRational; 4]>::try_from(r) {
            Ok([t, x, y, z]) => Ok(Observation::new(t, [x, y, z])),
            Err(r) => Err(Error::Invalid(format!("expected t,x,y,z, got {} columns", r.len()))),
        })
        .collect::<Result<_>>()?;
    let r = free_particle_refute(&obs)?;
    Ok(match r.refuted_at {
        Some(i) => format!("{} at observation {}", r.verdict, i + 1),
        None => r.verdict.to_string(),
    })
}

/// Every worked example, in a fixed order.
pub fn corpus() -> Vec<CorpusEntry> {
    use Basis::*;
    vec![
        CorpusEntry {
            name: "acyclic-preferences",
            signature: "sig digraph { rel edge/2 }",
            files: &["acyclic.fot", "acyclic.class", "cycle_obs.txt", "path_obs.txt", "three_cycle.struct"],
            expectations: vec![
                ex("A_3 syntax", Reference, "universal=true uncaf=true", |_| classified(sentence(&theory("acyclic", ACYCLIC)?, 2)?)),
                ex("3-cycle satisfies A_3", Oracle, "false", |_| {
                    Ok(satisfies(&structure(THREE_CYCLE)?, sentence(&theory("acyclic", ACYCLIC)?, 2)?)?.to_string())
                }),
                ex("3-cycle satisfies A_1", Oracle, "true", |_| {
                    Ok(satisfies(&structure(THREE_CYCLE)?, sentence(&theory("acyclic", ACYCLIC)?, 0)?)?.to_string())
                }),
                ex("forbidden diagrams at n=1", Reference, "{edge(x1,x1)}", |l| {
                    let f = forbidden_configurations(&acyclic()?, 1, l)?;
                    Ok(f.diagrams.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))
                }),
                ex("3-cycle forbidden at n=3", Oracle, "true", |l| {
                    let f = forbidden_configurations(&acyclic()?, 3, l)?;
                    let sig = acyclic()?.signature().clone();
                    let cycle = crate::falsify::Diagram::from_literals(
                        &sig,
                        3,
                        &[("edge", &[0, 1], true), ("edge", &[1, 2], true), ("edge", &[2, 0], true)],
                    )?;
                    Ok(f.forbids(&cycle).to_string())
                }),
                ex("falsifiable at n=1", Reference, "true", |l| Ok(falsifiable_at(&acyclic()?, 1, l)?.is_falsifiable().to_string())),
                ex("2-cycle observations", Oracle, "refuted", |_| Ok(refute(&theory("acyclic", ACYCLIC)?, &ObservationSet::parse(CYCLE_OBS)?)?.verdict.to_string())),
                ex("path observations", Definition, "consistent-so-far", |_| {
                    Ok(refute(&theory("acyclic", ACYCLIC)?, &ObservationSet::parse(PATH_OBS)?)?.verdict.to_string())
                }),
                ex("FIT up to 4 elements", Reference, "true", |l| Ok(check_fit(&acyclic()?, 4, l)?.is_fit().to_string())),
                ex("labeled 2-element models of psi_1 and psi_2", Oracle, "3", |l| {
                    let k = acyclic()?;
                    let psi = conj(vec![synthesize_psi(&k, 1, l)?, synthesize_psi(&k, 2, l)?]);
                    let mut count = 0;
                    for m in enumerate_structures(k.signature(), 2, l)? {
                        count += satisfies(&m, &psi)? as usize;
                    }
                    Ok(count.to_string())
                }),
            ],
        },
        CorpusEntry {
            name: "weak-preference",
            signature: "sig pref { rel pref/2 }",
            files: &["preference.fot"],
            expectations: vec![
                ex("completeness syntax", Reference, "universal=true uncaf=false", |_| classified(sentence(&theory("pref", PREFERENCE)?, 0)?)),
                ex("transitivity syntax", Definition, "universal=true uncaf=false", |_| classified(sentence(&theory("pref", PREFERENCE)?, 1)?)),
            ],
        },
        CorpusEntry {
            name: "swans",
            signature: "sig swans { rel S/1; rel W/1 }",
            files: &["swan.fot", "swan_obs.txt"],
            expectations: vec![
                ex("swan sentence syntax", Reference, "universal=true uncaf=false", |_| classified(sentence(&theory("swans", SWAN)?, 0)?)),
                ex("a non-white swan", Reference, "refuted", |_| Ok(refute(&theory("swans", SWAN)?, &ObservationSet::parse(SWAN_OBS)?)?.verdict.to_string())),
            ],
        },
        CorpusEntry {
            name: "all-digraphs",
            signature: "sig digraph { rel edge/2 }",
            files: &["digraphs.class"],
            expectations: vec![
                ex("forbidden diagrams at n=3", Reference, "0", |l| Ok(forbidden_configurations(&ClassSpec::parse(DIGRAPHS, None)?, 3, l)?.len().to_string())),
                ex("falsifiable at n=3", Reference, "false", |l| Ok(falsifiable_at(&ClassSpec::parse(DIGRAPHS, None)?, 3, l)?.is_falsifiable().to_string())),
            ],
        },
        CorpusEntry {
            name: "g-n",
            signature: "sig bipartite { rel R/2 }",
            files: &["gn2.struct"],
            expectations: vec![
                ex("G_1 vertices and edges", Definition, "3 1", |_| {
                    let g = make_gn(1)?;
                    Ok(format!("{} {}", g.size(), g.relation_tuples(0).len()))
                }),
                ex("G_2 vertices and edges", Oracle, "6 4", |_| {
                    let g = make_gn(2)?;
                    Ok(format!("{} {}", g.size(), g.relation_tuples(0).len()))
                }),
                ex("VC of R(x;y) in G_2", Oracle, "exact 2", |l| vc_of(2, l)),
                ex("VC of R(x;y) in G_3", Oracle, "exact 3", |l| vc_of(3, l)),
                ex("G_2 satisfies VC_2(R)", Reference, "false", |_| {
                    let g = make_gn(2)?;
                    let (pf, _) = parse_partitioned("R(x;y)", Some(g.signature()))?;
                    Ok(satisfies(&g, &vc_sentence(&pf, 2)?)?.to_string())
                }),
            ],
        },
        CorpusEntry {
            name: "fraisse",
            signature: "sig order { rel lt/2 }",
            files: &["linear_orders.class", "short_orders.class", "three_chain.class"],
            expectations: vec![
                ex("linear orders have AP up to 4", Reference, "true", |l| Ok(check_ap(&ClassSpec::parse(LINEAR_ORDERS, None)?, 4, false, l)?.holds.to_string())),
                ex("linear orders have HP up to 5", Reference, "true", |l| Ok(check_hp(&ClassSpec::parse(LINEAR_ORDERS, None)?, 5, l)?.holds.to_string())),
                ex("orders of size at most 2 have AP", Oracle, "false", |l| Ok(check_ap(&ClassSpec::parse(SHORT_ORDERS, None)?, 3, false, l)?.holds.to_string())),
                ex("the 3-chain alone has HP", Oracle, "false", |l| Ok(check_hp(&ClassSpec::parse(THREE_CHAIN, None)?, 3, l)?.holds.to_string())),
                ex("finite models of T_tau over {H/1} are Fraisse up to 4", Reference, "true", |l| {
                    let sig = crate::Signature::new("coin").with_relation("H", 1)?;
                    let k = ClassSpec::intensional(time_indexed_theory(&sig, false)?);
                    Ok(check_fraisse(&k, 4, false, l)?.is_fraisse().to_string())
                }),
            ],
        },
        CorpusEntry {
            name: "coin-chain",
            signature: "sig coin { rel H/1 }",
            files: &["coin.json", "skew.json", "heads.json", "heads_then_tails.json", "same_time.json"],
            expectations: vec![
                ex("stationary distribution of the skew chain", Oracle, "(1/3, 2/3)", |l| Ok(stationary(&chain(SKEW, l)?.rho)?.to_string())),
                ex("heads within 10 fair flips", Oracle, "1023/1024", |l| exact_text(realized(COIN, HEADS, 10, Mode::Exact, l)?)),
                ex("two conditions at one time", Definition, "0", |l| exact_text(realized(COIN, SAME_TIME, 10, Mode::Exact, l)?)),
                ex("heads then tails within 100 flips, 1000 trials, seed 7", Oracle, "at least 0.99", |l| {
                    let r = realized(COIN, HEADS_THEN_TAILS, 100, Mode::MonteCarlo { trials: 1000, seed: 7 }, l)?;
                    Ok(if r.value() >= 0.99 { "at least 0.99".into() } else { format!("{}", r.value()) })
                }),
                ex("5 flips render as a discrete time-indexed model", Reference, "true", |l| {
                    let spec = chain(COIN, l)?;
                    let run = simulate(&spec.mu, &spec.rho, 5, 42)?;
                    let t = time_indexed_theory(spec.space.signature(), true)?;
                    Ok(t.is_model(&run.to_structure(&spec.space)?)?.to_string())
                }),
            ],
        },
        CorpusEntry {
            name: "free-particle",
            signature: "positions in rational 3-space",
            files: &["particle_line.csv", "particle_bent.csv"],
            expectations: vec![
                ex("positions on the diagonal", Definition, "consistent-so-far", |_| particle(PARTICLE_LINE)),
                ex("a bend after two observations", Oracle, "refuted at observation 3", |_| particle(PARTICLE_BENT)),
            ],
        },
        CorpusEntry {
            name: "planar-families",
            signature: "rational points in the plane",
            files: &["triangle.csv", "line_grid.csv", "fatline_grid.csv"],
            expectations: vec![
                ex("lines on the triangle", Oracle, "2", |l| family_bound(ParametricFamily::line(), LINE_GRID, l)),
                ex("fat lines on the triangle", Oracle, "3", |l| family_bound(ParametricFamily::fat_line(), FATLINE_GRID, l)),
            ],
        },
    ]
}

fn vc_of(n: usize, limits: &Limits) -> Result<String> {
    let g = make_gn(n)?;
    let (pf, _) = parse_partitioned("R(x;y)", Some(g.signature()))?;
    let d = vc_dimension(&g, &pf, n + 2, limits)?;
    Ok(format!("{} {}", if d.is_exact() { "exact" } else { "at least" }, d.value()))
}

fn exact_text(r: Realization) -> Result<String> {
    match r {
        Realization::Exact { probability } => Ok(probability.to_string()),
        other => Err(Error::Invalid(format!("expected an exact value, got {other:?}"))),
    }
}

fn family_bound(family: ParametricFamily, grid: &str, limits: &Limits) -> Result<String> {
    let points = read_rational_table(TRIANGLE)?;
    let grid = read_rational_table(grid)?;
    Ok(parametric_vc_lower_bound(&family, &points, &grid, limits)?.lower_bound.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let c = corpus();
        let mut names: Vec<_> = c.iter().map(|e| e.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), c.len());
    }

    #[test]
    fn files_exist() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
        for e in corpus() {
            for f in e.files {
                assert!(dir.join(f).exists(), "{f}");
            }
        }
    }

    #[test]
    fn quick_entries_verify() {
        for e in corpus().iter().filter(|e| e.name != "fraisse") {
            for o in e.verify(&Limits::default()) {
                assert!(o.ok, "{}: {} expected {} got {}", o.entry, o.what, o.expected, o.actual);
            }
        }
    }
}
