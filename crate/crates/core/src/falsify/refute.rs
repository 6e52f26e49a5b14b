//! Refuting theories from finite observation data.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lexer::{Cursor, Tok};
use crate::logic::{eval3, Partial, Theory, UniversalSentence};

/// A ground atom or negated atom over observation constants.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GroundLiteral {
    pub relation: String,
    pub args: Vec<String>,
    pub positive: bool,
}

impl GroundLiteral {
    pub fn new(relation: &str, args: &[&str], positive: bool) -> GroundLiteral {
        GroundLiteral { relation: relation.to_string(), args: args.iter().map(|a| a.to_string()).collect(), positive }
    }

    fn atom(&self) -> String {
        format!("{}({})", self.relation, self.args.join(","))
    }
}

impl fmt::Display for GroundLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.positive { "" } else { "!" }, self.atom())
    }
}

/// Named constants and the literals observed about them.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ObservationSet {
    constants: Vec<String>,
    literals: Vec<GroundLiteral>,
}

impl ObservationSet {
    /// Constants are ordered by first appearance.
    pub fn new(constants: &[&str], literals: Vec<GroundLiteral>) -> Result<ObservationSet> {
        let mut obs = ObservationSet { constants: constants.iter().map(|c| c.to_string()).collect(), literals: Vec::new() };
        obs.constants.dedup();
        for l in literals {
            obs = obs.with(l)?;
        }
        Ok(obs)
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn literals(&self) -> &[GroundLiteral] {
        &self.literals
    }

    /// A copy with one more literal; repeated literals are ignored.
    pub fn with(&self, lit: GroundLiteral) -> Result<ObservationSet> {
        let mut out = self.clone();
        for l in &self.literals {
            if l.relation == lit.relation && l.args.len() != lit.args.len() {
                return Err(Error::Arity { symbol: lit.relation.clone(), expected: l.args.len(), got: lit.args.len() });
            }
            if l.relation == lit.relation && l.args == lit.args {
                if l.positive != lit.positive {
                    return Err(Error::InconsistentObservations(lit.atom()));
                }
                return Ok(out);
            }
        }
        for a in &lit.args {
            if !out.constants.contains(a) {
                out.constants.push(a.clone());
            }
        }
        out.literals.push(lit);
        Ok(out)
    }

    /// One ground literal per line (`edge(a,b)`, `!W(a)`); a bare name
    /// declares a constant. `#` starts a comment.
    pub fn parse(text: &str) -> Result<ObservationSet> {
        let mut obs = ObservationSet::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |e: Error| match e {
                Error::Syntax { pos, msg } => Error::Syntax { pos: crate::error::Pos { line: i + 1, col: pos.col }, msg },
                other => other,
            };
            let mut cur = Cursor::new(line).map_err(at)?;
            let positive = !cur.eat(&Tok::Not);
            let name = cur.ident().map_err(at)?;
            if !cur.eat(&Tok::LParen) {
                cur.expect_end().map_err(at)?;
                if !positive {
                    return Err(at(cur.error("a constant declaration cannot be negated".into())));
                }
                if !obs.constants.contains(&name) {
                    obs.constants.push(name);
                }
                continue;
            }
            let mut args = Vec::new();
            if !cur.eat(&Tok::RParen) {
                loop {
                    args.push(cur.ident().map_err(at)?);
                    if cur.eat(&Tok::RParen) {
                        break;
                    }
                    cur.expect(&Tok::Comma).map_err(at)?;
                }
            }
            cur.expect_end().map_err(at)?;
            obs = obs.with(GroundLiteral { relation: name, args, positive })?;
        }
        Ok(obs)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.constants {
            if !self.literals.iter().any(|l| l.args.contains(c)) {
                out.push_str(&format!("{c}\n"));
            }
        }
        for l in &self.literals {
            out.push_str(&format!("{l}\n"));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Refuted,
    ConsistentSoFar,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Refuted => "refuted",
            Verdict::ConsistentSoFar => "consistent-so-far",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RefutationReport {
    pub verdict: Verdict,
    pub witness_sentence: Option<String>,
    /// Position of the witness in the theory.
    pub witness_index: Option<usize>,
    /// Variable to constant, for the witness instance.
    pub substitution: Option<BTreeMap<String, String>>,
    /// Universal sentences that were grounded.
    pub grounded: usize,
    /// Sentences skipped because they are not universal.
    pub skipped: usize,
}

struct View<'a> {
    env: &'a [Option<usize>],
    facts: &'a HashMap<(usize, Vec<usize>), bool>,
    consts: &'a [usize],
}

impl Partial for View<'_> {
    fn var(&self, slot: usize) -> Option<usize> {
        self.env[slot]
    }
    fn constant(&self, c: usize) -> Option<usize> {
        Some(self.consts[c])
    }
    fn apply(&self, _: usize, _: &[usize]) -> Option<usize> {
        None
    }
    fn atom(&self, r: usize, args: &[usize]) -> Option<bool> {
        self.facts.get(&(r, args.to_vec())).copied()
    }
}

/// Grounds every universal sentence of `theory` over the observed constants
/// and evaluates each instance in Kleene logic: recorded literals are true or
/// false, everything else is unknown, and distinct names denote distinct
/// elements. The first definitely false instance, in sentence order and then
/// lexicographic order of assignments, is the witness.
pub fn refute(theory: &Theory, obs: &ObservationSet) -> Result<RefutationReport> {
    let sig = &theory.sig;
    let mut domain: Vec<String> = obs.constants.clone();
    let mut consts = Vec::new();
    for c in sig.constants() {
        let i = match domain.iter().position(|d| d == c) {
            Some(i) => i,
            None => {
                domain.push(c.clone());
                domain.len() - 1
            }
        };
        consts.push(i);
    }
    let mut facts = HashMap::new();
    for l in &obs.literals {
        let Some(r) = sig.relation_index(&l.relation) else { continue };
        let arity = sig.relations()[r].arity;
        if arity != l.args.len() {
            return Err(Error::Arity { symbol: l.relation.clone(), expected: arity, got: l.args.len() });
        }
        let args = l.args.iter().map(|a| domain.iter().position(|d| d == a).expect("observed constant")).collect();
        facts.insert((r, args), l.positive);
    }
    let mut report = RefutationReport {
        verdict: Verdict::ConsistentSoFar,
        witness_sentence: None,
        witness_index: None,
        substitution: None,
        grounded: 0,
        skipped: 0,
    };
    for (i, s) in theory.sentences.iter().enumerate() {
        let Ok(u) = UniversalSentence::new(s, sig) else {
            report.skipped += 1;
            continue;
        };
        report.grounded += 1;
        if domain.is_empty() || report.verdict == Verdict::Refuted {
            continue;
        }
        let judge = |env: &[Option<usize>]| eval3(&u.matrix, &View { env, facts: &facts, consts: &consts });
        if let Some(w) = u.falsifier(domain.len(), None, &judge) {
            report.verdict = Verdict::Refuted;
            report.witness_sentence = Some(s.to_string());
            report.witness_index = Some(i);
            report.substitution = Some(u.vars.iter().cloned().zip(w.iter().map(|&e| domain[e].clone())).collect());
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theory(text: &str) -> Theory {
        Theory::parse("t", text).unwrap()
    }

    #[test]
    fn two_cycle_refutes_asymmetry() {
        let t = theory("sig g { rel edge/2 }\nforall x1,x2. !(edge(x1,x2) & edge(x2,x1))");
        let obs = ObservationSet::parse("edge(a,b)\nedge(b,a)").unwrap();
        let r = refute(&t, &obs).unwrap();
        assert_eq!(r.verdict, Verdict::Refuted);
        let sub = r.substitution.unwrap();
        assert_eq!(sub["x1"], "a");
        assert_eq!(sub["x2"], "b");
    }

    #[test]
    fn a_path_is_no_counterexample() {
        let t = theory("sig g { rel edge/2 }\nforall x,y,z. !(edge(x,y) & edge(y,z) & edge(z,x))");
        let obs = ObservationSet::parse("edge(a,b)\nedge(b,c)").unwrap();
        assert_eq!(refute(&t, &obs).unwrap().verdict, Verdict::ConsistentSoFar);
    }

    #[test]
    fn a_black_swan_refutes() {
        let t = theory("forall x. !(S(x) & !W(x))");
        let obs = ObservationSet::parse("S(c)\n!W(c)").unwrap();
        assert_eq!(refute(&t, &obs).unwrap().verdict, Verdict::Refuted);
        let partial = ObservationSet::parse("S(c)").unwrap();
        assert_eq!(refute(&t, &partial).unwrap().verdict, Verdict::ConsistentSoFar);
    }

    #[test]
    fn distinct_names_are_distinct() {
        let t = theory("sig g { rel P/1 }\nforall x,y. x = y");
        let one = ObservationSet::parse("a").unwrap();
        assert_eq!(refute(&t, &one).unwrap().verdict, Verdict::ConsistentSoFar);
        let two = ObservationSet::parse("a\nb").unwrap();
        assert_eq!(refute(&t, &two).unwrap().verdict, Verdict::Refuted);
    }

    #[test]
    fn existential_sentences_are_skipped() {
        let t = theory("sig g { rel P/1 }\nexists x. P(x)");
        let r = refute(&t, &ObservationSet::parse("!P(a)").unwrap()).unwrap();
        assert_eq!((r.verdict, r.grounded, r.skipped), (Verdict::ConsistentSoFar, 0, 1));
    }

    #[test]
    fn contradictory_observations_are_rejected() {
        assert!(matches!(ObservationSet::parse("P(a)\n!P(a)"), Err(Error::InconsistentObservations(_))));
        assert!(ObservationSet::parse("P(a)\nP(a,b)").is_err());
    }

    #[test]
    fn text_round_trip() {
        let obs = ObservationSet::parse("z\nedge(a,b)\n!W(a)").unwrap();
        assert_eq!(ObservationSet::parse(&obs.to_text()).unwrap().literals(), obs.literals());
        assert_eq!(obs.constants(), ["z", "a", "b"]);
    }
}
