//! Probability that a chain realizes a configuration of states at
//! increasing times within a finite horizon.

use std::collections::{BTreeSet, HashMap};

use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::fraisse::search::for_each_embedding;
use crate::logic::{parse_formula, Compiled, Formula};
use crate::sigstruct::text::parse_structure;
use crate::sigstruct::Structure;

use super::matrix::{Dist, StateSpace, StochMatrix};
use super::sim::Sampler;

/// What the state at a step's time must satisfy.
#[derive(Clone, Debug)]
pub enum Condition {
    /// Some distinct objects realize the diagram of this structure.
    Embeds(Structure),
    /// The state satisfies this sentence.
    Sentence(Formula),
}

impl Condition {
    pub fn holds(&self, state: &Structure) -> Result<bool> {
        match self {
            Condition::Embeds(m) => {
                let mut found = false;
                for_each_embedding(m, state, &mut |_| {
                    found = true;
                    true
                });
                Ok(found)
            }
            Condition::Sentence(f) => Ok(Compiled::new(f, state.signature())?.eval(state, &[])),
        }
    }
}

/// A time written as a variable plus a number of successor steps:
/// `t`, `t+2` or `S(S(t))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimeTerm {
    pub var: String,
    pub offset: usize,
}

impl std::str::FromStr for TimeTerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<TimeTerm> {
        let bad = || Error::Invalid(format!("`{s}` is not a time term"));
        let mut t = s.trim();
        let mut offset = 0;
        while let Some(inner) = t.strip_prefix("S(").and_then(|r| r.strip_suffix(')')) {
            offset += 1;
            t = inner.trim();
        }
        if let Some((v, k)) = t.split_once('+') {
            offset += k.trim().parse::<usize>().map_err(|_| bad())?;
            t = v.trim();
        }
        if !t.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') || !crate::sigstruct::is_identifier(t) {
            return Err(bad());
        }
        Ok(TimeTerm { var: t.to_string(), offset })
    }
}

impl std::fmt::Display for TimeTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.offset {
            0 => write!(f, "{}", self.var),
            k => write!(f, "{}+{k}", self.var),
        }
    }
}

/// One conjunct `φ(x̄ᵢ, sᵢ)` of a configuration.
#[derive(Clone, Debug)]
pub struct Step {
    pub condition: Condition,
    pub at: TimeTerm,
}

/// States required at times `s₁ < s₂ < …`, each time a [`TimeTerm`] over
/// variables ranging over the naturals.
#[derive(Clone, Debug)]
pub struct RealizationConfig {
    pub steps: Vec<Step>,
}

/// File form: `{"steps": [{"structure": "...", "at": "t"}, {"sentence": "...", "at": "u+1"}]}`.
/// A step without `at` gets a variable of its own.
#[derive(Deserialize)]
struct ConfigFile {
    steps: Vec<StepFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StepFile {
    structure: Option<String>,
    sentence: Option<String>,
    at: Option<String>,
}

impl RealizationConfig {
    /// Reads the JSON form against the base signature of `space`.
    pub fn from_json(text: &str, space: &StateSpace) -> Result<RealizationConfig> {
        let file: ConfigFile = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("configuration: {e}")))?;
        let sig = space.signature();
        let mut steps = Vec::new();
        for (i, s) in file.steps.into_iter().enumerate() {
            let condition = match (s.structure, s.sentence) {
                (Some(text), None) => {
                    let (_, m) = parse_structure(&text, &[sig.clone()])?;
                    sig.ensure_same(m.signature())?;
                    Condition::Embeds(m)
                }
                (None, Some(text)) => {
                    let f = parse_formula(&text, sig)?;
                    if !f.is_sentence() {
                        return Err(Error::OpenFormula(f.free_vars().join(", ")));
                    }
                    Condition::Sentence(f)
                }
                _ => return Err(Error::Invalid(format!("step {i} needs exactly one of `structure` and `sentence`"))),
            };
            let at = match s.at {
                Some(t) => t.parse()?,
                None => TimeTerm { var: format!("_s{i}"), offset: 0 },
            };
            steps.push(Step { condition, at });
        }
        Ok(RealizationConfig { steps })
    }

    fn variables(&self) -> Vec<String> {
        let mut vars: Vec<String> = Vec::new();
        for s in &self.steps {
            if !vars.contains(&s.at.var) {
                vars.push(s.at.var.clone());
            }
        }
        vars
    }

    /// The least times `s₁ < s₂ < …` meeting the time terms, or `None` when
    /// the pattern cannot be met in `(ω, <, S)`.
    pub fn minimal_times(&self) -> Option<Vec<usize>> {
        let vars = self.variables();
        let var = |s: &Step| vars.iter().position(|v| *v == s.at.var).expect("listed");
        // v_b + c_b ≥ v_a + c_a + 1, solved by longest paths from zero
        let mut value = vec![0i64; vars.len()];
        for _ in 0..=vars.len() {
            let mut changed = false;
            for w in self.steps.windows(2) {
                let (a, b) = (var(&w[0]), var(&w[1]));
                let need = value[a] + w[0].at.offset as i64 + 1 - w[1].at.offset as i64;
                if value[b] < need {
                    value[b] = need;
                    changed = true;
                }
            }
            if !changed {
                return Some(self.steps.iter().map(|s| (value[var(s)] + s.at.offset as i64) as usize).collect());
            }
        }
        None
    }
}

/// How to compute a realization probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    MonteCarlo { trials: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Realization {
    Exact {
        #[serde(serialize_with = "rational_text")]
        probability: BigRational,
    },
    MonteCarlo {
        estimate: f64,
        std_error: f64,
        hits: u64,
        trials: u64,
        seed: u64,
    },
}

fn rational_text<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl Realization {
    pub fn value(&self) -> f64 {
        match self {
            Realization::Exact { probability } => num_traits::ToPrimitive::to_f64(probability).unwrap_or(f64::NAN),
            Realization::MonteCarlo { estimate, .. } => *estimate,
        }
    }
}

/// Progress of a partial match: steps matched so far, and for each variable
/// still in use, its value minus the current time.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Match {
    done: usize,
    vars: Vec<Option<i64>>,
}

/// Nondeterministic matcher of a configuration against a run, one time at a time.
struct Matcher {
    /// Per step: variable index and offset.
    steps: Vec<(usize, i64)>,
    /// Per step: which states satisfy its condition.
    sat: Vec<Vec<bool>>,
}

impl Matcher {
    fn new(config: &RealizationConfig, space_states: &[Structure]) -> Result<Matcher> {
        let vars = config.variables();
        let steps = config.steps.iter().map(|s| (vars.iter().position(|v| *v == s.at.var).expect("listed"), s.at.offset as i64)).collect();
        let sat = config.steps.iter().map(|s| space_states.iter().map(|w| s.condition.holds(w)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
        Ok(Matcher { steps, sat })
    }

    fn start(&self) -> Match {
        let n = self.steps.iter().map(|s| s.0 + 1).max().unwrap_or(0);
        Match { done: 0, vars: vec![None; n] }
    }

    /// Whether every remaining step with a bound variable still lies ahead (after now).
    fn viable(&self, m: &Match) -> bool {
        self.steps[m.done..].iter().all(|&(v, c)| m.vars[v].is_none_or(|rel| rel + c >= 1))
    }

    /// Forgets variables no remaining step uses.
    fn prune(&self, mut m: Match) -> Match {
        for v in 0..m.vars.len() {
            if !self.steps[m.done..].iter().any(|s| s.0 == v) {
                m.vars[v] = None;
            }
        }
        m
    }

    /// Reads the state at time `now`: returns true if some branch completes,
    /// otherwise the branches alive for the next time, already shifted.
    fn read(&self, current: &BTreeSet<Match>, state: usize, now: i64) -> Option<BTreeSet<Match>> {
        let mut next = BTreeSet::new();
        for m in current {
            let (v, c) = self.steps[m.done];
            let fits = match m.vars[v] {
                Some(rel) => rel + c == 0,
                None => now - c >= 0,
            };
            if fits && self.sat[m.done][state] {
                if m.done + 1 == self.steps.len() {
                    return None;
                }
                let mut adv = m.clone();
                adv.done += 1;
                adv.vars[v] = Some(-c);
                let adv = self.prune(adv);
                if self.viable(&adv) {
                    next.insert(adv);
                }
            }
            if self.viable(m) {
                next.insert(m.clone());
            }
        }
        Some(next.into_iter().map(|mut m| {
            for r in m.vars.iter_mut().flatten() {
                *r -= 1;
            }
            m
        }).collect())
    }
}

/// Probability that the run `X₀ … X_{horizon−1}` of `(mu, rho)` on `space`
/// realizes `config`: some times `s₁ < s₂ < …` below the horizon meeting
/// the time terms with each `X_{sᵢ}` satisfying step `i`.
///
/// Exact mode propagates the joint law of the state and the set of partial
/// matches, with a completed match absorbing; its cell count is bounded by
/// `limits.markov_states`. Monte Carlo runs trial `i` with seed `seed ^ i`.
pub fn realization_probability(
    config: &RealizationConfig,
    space: &StateSpace,
    mu: &Dist,
    rho: &StochMatrix,
    horizon: usize,
    mode: Mode,
    limits: &Limits,
) -> Result<Realization> {
    if mu.len() != space.len() || rho.len() != space.len() {
        return Err(Error::Invalid(format!("chain has {} states but the state space has {}", rho.len(), space.len())));
    }
    let unsat = config.steps.is_empty() || config.minimal_times().is_none();
    let matcher = Matcher::new(config, space.states())?;
    match mode {
        Mode::Exact => {
            if unsat {
                return Ok(Realization::Exact { probability: BigRational::zero() });
            }
            Ok(Realization::Exact { probability: exact(&matcher, mu, rho, horizon, limits)? })
        }
        Mode::MonteCarlo { trials, seed } => {
            if trials == 0 {
                return Err(Error::Invalid("Monte Carlo needs at least one trial".into()));
            }
            let sampler = Sampler::new(mu, rho);
            let mut hits = 0;
            if !unsat {
                for trial in 0..trials {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ trial);
                    let mut alive = BTreeSet::from([matcher.start()]);
                    let mut now = 0;
                    let mut hit = false;
                    sampler.run(horizon, &mut rng, |s| {
                        match matcher.read(&alive, s, now) {
                            None => hit = true,
                            Some(next) => alive = next,
                        }
                        now += 1;
                        hit || alive.is_empty()
                    });
                    hits += hit as u64;
                }
            }
            let p = hits as f64 / trials as f64;
            Ok(Realization::MonteCarlo { estimate: p, std_error: (p * (1.0 - p) / trials as f64).sqrt(), hits, trials, seed })
        }
    }
}

fn exact(matcher: &Matcher, mu: &Dist, rho: &StochMatrix, horizon: usize, limits: &Limits) -> Result<BigRational> {
    let k = rho.len();
    let mut success = BigRational::zero();
    let mut law: HashMap<(usize, BTreeSet<Match>), BigRational> = HashMap::new();
    let start = BTreeSet::from([matcher.start()]);
    for (w, p) in mu.entries().iter().enumerate() {
        if !p.is_zero() {
            law.insert((w, start.clone()), p.clone());
        }
    }
    for now in 0..horizon as i64 {
        let mut read: HashMap<(usize, BTreeSet<Match>), BigRational> = HashMap::new();
        for ((w, alive), p) in law {
            match matcher.read(&alive, w, now) {
                None => success += p,
                Some(next) if next.is_empty() => {}
                Some(next) => *read.entry((w, next)).or_insert_with(BigRational::zero) += p,
            }
        }
        if now + 1 == horizon as i64 {
            break;
        }
        let mut moved: HashMap<(usize, BTreeSet<Match>), BigRational> = HashMap::new();
        for ((w, alive), p) in read {
            for w2 in 0..k {
                let q = rho.get(w, w2);
                if !q.is_zero() {
                    *moved.entry((w2, alive.clone())).or_insert_with(BigRational::zero) += &p * q;
                }
            }
        }
        if moved.len() as u64 > limits.markov_states {
            return Err(Error::budget("exact realization", format!("{} (state, match) cells", moved.len()), limits.markov_states));
        }
        law = moved;
    }
    Ok(success)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::coin_chain;

    fn half() -> BigRational {
        BigRational::new(1.into(), 2.into())
    }

    fn q(n: u64, d: u64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    const HEADS: &str = r#"{"structure": "structure h over coin { dom = {c}; H = {c} }"}"#;
    const TAILS: &str = r#"{"structure": "structure t over coin { dom = {c} }"}"#;

    fn config(space: &StateSpace, steps: &[(&str, Option<&str>)]) -> RealizationConfig {
        let parts: Vec<String> = steps
            .iter()
            .map(|(c, at)| match at {
                Some(t) => format!("{}, \"at\": \"{t}\"}}", c.trim_end_matches('}')),
                None => c.to_string(),
            })
            .collect();
        RealizationConfig::from_json(&format!("{{\"steps\": [{}]}}", parts.join(",")), space).unwrap()
    }

    /// Enumerates all runs of the given length and checks the configuration
    /// against every assignment of times.
    fn brute(cfg: &RealizationConfig, space: &StateSpace, mu: &Dist, rho: &StochMatrix, horizon: usize) -> BigRational {
        let k = space.len();
        let vars = cfg.variables();
        let mut total = BigRational::zero();
        for code in 0..k.pow(horizon as u32) {
            let mut run = Vec::new();
            let mut c = code;
            for _ in 0..horizon {
                run.push(c % k);
                c /= k;
            }
            let mut p = mu.get(run[0]).clone();
            for w in run.windows(2) {
                p *= rho.get(w[0], w[1]);
            }
            if p.is_zero() {
                continue;
            }
            let mut found = false;
            for vals in 0..horizon.pow(vars.len() as u32) {
                let mut val = Vec::new();
                let mut c = vals;
                for _ in 0..vars.len() {
                    val.push(c % horizon);
                    c /= horizon;
                }
                let times: Vec<usize> = cfg.steps.iter().map(|s| val[vars.iter().position(|v| *v == s.at.var).unwrap()] + s.at.offset).collect();
                if times.windows(2).all(|w| w[0] < w[1])
                    && times.iter().all(|&t| t < horizon)
                    && cfg.steps.iter().zip(&times).all(|(s, &t)| s.condition.holds(space.state(run[t])).unwrap())
                {
                    found = true;
                    break;
                }
            }
            if found {
                total += p;
            }
        }
        total
    }

    fn exact_value(cfg: &RealizationConfig, space: &StateSpace, mu: &Dist, rho: &StochMatrix, horizon: usize) -> BigRational {
        match realization_probability(cfg, space, mu, rho, horizon, Mode::Exact, &Limits::default()).unwrap() {
            Realization::Exact { probability } => probability,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn time_terms_parse() {
        assert_eq!("t".parse::<TimeTerm>().unwrap(), TimeTerm { var: "t".into(), offset: 0 });
        assert_eq!("S(S(t))".parse::<TimeTerm>().unwrap(), TimeTerm { var: "t".into(), offset: 2 });
        assert_eq!("u + 3".parse::<TimeTerm>().unwrap(), TimeTerm { var: "u".into(), offset: 3 });
        assert!("3".parse::<TimeTerm>().is_err());
        assert!("S(t".parse::<TimeTerm>().is_err());
    }

    #[test]
    fn seeing_heads_within_ten_flips() {
        let (space, mu, rho) = coin_chain(&half(), &Limits::default()).unwrap();
        let cfg = config(&space, &[(HEADS, None)]);
        assert_eq!(exact_value(&cfg, &space, &mu, &rho, 10), q(1023, 1024));
    }

    #[test]
    fn repeated_time_is_unsatisfiable() {
        let (space, mu, rho) = coin_chain(&half(), &Limits::default()).unwrap();
        let cfg = config(&space, &[(HEADS, Some("t")), (HEADS, Some("t"))]);
        assert_eq!(cfg.minimal_times(), None);
        assert!(exact_value(&cfg, &space, &mu, &rho, 10).is_zero());
        let back = config(&space, &[(HEADS, Some("t+2")), (TAILS, Some("S(t)"))]);
        assert!(exact_value(&back, &space, &mu, &rho, 10).is_zero());
    }

    #[test]
    fn minimal_times_follow_the_terms() {
        let (space, ..) = coin_chain(&half(), &Limits::default()).unwrap();
        let cfg = config(&space, &[(HEADS, Some("t+1")), (TAILS, None), (HEADS, Some("t+4")), (TAILS, Some("u"))]);
        assert_eq!(cfg.minimal_times(), Some(vec![1, 2, 4, 5]));
    }

    #[test]
    fn exact_matches_enumeration_of_runs() {
        let (space, _, _) = coin_chain(&half(), &Limits::default()).unwrap();
        let rho = StochMatrix::new(vec![vec![q(1, 3), q(2, 3)], vec![q(3, 4), q(1, 4)]]).unwrap();
        let mu = Dist::new(vec![q(1, 5), q(4, 5)]).unwrap();
        let configs = [
            vec![(HEADS, None), (TAILS, None)],
            vec![(HEADS, Some("t")), (HEADS, Some("t+1"))],
            vec![(TAILS, Some("t+1")), (HEADS, None), (TAILS, Some("t+3"))],
            vec![(HEADS, Some("t")), (TAILS, Some("u")), (HEADS, Some("t+3")), (HEADS, Some("u+2"))],
        ];
        for steps in &configs {
            let cfg = config(&space, steps);
            for horizon in 1..=7 {
                assert_eq!(exact_value(&cfg, &space, &mu, &rho, horizon), brute(&cfg, &space, &mu, &rho, horizon), "{steps:?} at {horizon}");
            }
        }
    }

    #[test]
    fn positive_chains_increase_in_horizon() {
        let (space, _, _) = coin_chain(&half(), &Limits::default()).unwrap();
        let rho = StochMatrix::new(vec![vec![q(9, 10), q(1, 10)], vec![q(1, 5), q(4, 5)]]).unwrap();
        let mu = Dist::new(vec![q(2, 3), q(1, 3)]).unwrap();
        let cfg = config(&space, &[(HEADS, Some("t")), (TAILS, Some("t+1")), (HEADS, None)]);
        let first = cfg.minimal_times().unwrap().last().copied().unwrap() + 1;
        let mut last = BigRational::zero();
        for horizon in first..first + 12 {
            let p = exact_value(&cfg, &space, &mu, &rho, horizon);
            assert!(p > last);
            last = p;
        }
    }

    #[test]
    fn monte_carlo_agrees_with_exact() {
        let (space, mu, rho) = coin_chain(&half(), &Limits::default()).unwrap();
        let cfg = config(&space, &[(HEADS, None), (TAILS, None)]);
        let mc = realization_probability(&cfg, &space, &mu, &rho, 100, Mode::MonteCarlo { trials: 1000, seed: 7 }, &Limits::default()).unwrap();
        assert!(mc.value() >= 0.99);
        let short = config(&space, &[(HEADS, Some("t")), (HEADS, Some("t+1")), (TAILS, None)]);
        let exact = exact_value(&short, &space, &mu, &rho, 6);
        let Realization::MonteCarlo { estimate, std_error, .. } =
            realization_probability(&short, &space, &mu, &rho, 6, Mode::MonteCarlo { trials: 10_000, seed: 3 }, &Limits::default()).unwrap()
        else {
            unreachable!()
        };
        let exact = num_traits::ToPrimitive::to_f64(&exact).unwrap();
        assert!((estimate - exact).abs() <= 3.0 * std_error, "{estimate} vs {exact} ± {std_error}");
    }
}
