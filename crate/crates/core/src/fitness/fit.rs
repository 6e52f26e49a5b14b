//! Bounded checks of the FIT and fg-FIT clauses.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Serialize, Serializer};

use crate::config::Limits;
use crate::error::Result;
use crate::falsify::ClassSpec;
use crate::sigstruct::{canonical_form, closed_subsets, closure, enumerate_structures, for_each_combination, Structure};

/// Which substructures the clauses range over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubstructureNotion {
    Finite,
    FinitelyGenerated,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IrrevocabilityWitness {
    #[serde(serialize_with = "crate::sigstruct::serialize_text")]
    pub member: Structure,
    /// Domain of the substructure outside the class.
    pub substructure: Vec<usize>,
}

impl IrrevocabilityWitness {
    pub fn substructure(&self) -> Structure {
        self.member.induced(&self.substructure).expect("witness domain is closed")
    }
}

/// Verdicts hold up to the bound only; nothing is claimed about larger or
/// infinite structures.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReport {
    pub notion: SubstructureNotion,
    pub bound: usize,
    pub up_to_bound: bool,
    /// Some structure up to the bound lies outside the class.
    pub nontrivial: bool,
    #[serde(serialize_with = "crate::sigstruct::serialize_text_opt")]
    pub non_member: Option<Structure>,
    pub finitely_testable: bool,
    /// A non-member all of whose substructures are members.
    #[serde(serialize_with = "crate::sigstruct::serialize_text_opt")]
    pub testability_counterexample: Option<Structure>,
    pub irrevocably_testable: bool,
    pub irrevocability_counterexample: Option<IrrevocabilityWitness>,
    /// Non-members with at least two elements and no proper substructure.
    /// Over a finite domain the structure is its own finite substructure, so
    /// the testability clause cannot fail; these are the bounded shadows of
    /// the infinite structures on which it does.
    #[serde(serialize_with = "list_text")]
    pub vacuous_substructure_warning: Vec<Structure>,
}

impl FitReport {
    pub fn is_fit(&self) -> bool {
        self.nontrivial && self.finitely_testable && self.irrevocably_testable
    }
}

fn list_text<S: Serializer>(ms: &[Structure], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(ms.iter().map(|m| m.to_text("M")))
}

/// Domains of the substructures of `m` in the chosen sense, by size then lexicographically.
fn substructure_domains(m: &Structure, notion: SubstructureNotion) -> Result<Vec<Vec<usize>>> {
    match notion {
        SubstructureNotion::Finite => Ok(closed_subsets(m, m.size())),
        SubstructureNotion::FinitelyGenerated => {
            let mut out = BTreeSet::new();
            let start = if m.constants().is_empty() { 1 } else { 0 };
            for k in start..=m.size() {
                let mut seeds = Vec::new();
                for_each_combination(m.size(), k, |c| seeds.push(c.to_vec()));
                for seed in seeds {
                    let dom = closure(m, &seed, m.size())?;
                    out.insert((dom.len(), dom));
                }
            }
            Ok(out.into_iter().map(|(_, d)| d).collect())
        }
    }
}

pub fn check_fit(class: &ClassSpec, bound: usize, limits: &Limits) -> Result<FitReport> {
    check(class, bound, SubstructureNotion::Finite, limits)
}

pub fn check_fg_fit(class: &ClassSpec, bound: usize, limits: &Limits) -> Result<FitReport> {
    check(class, bound, SubstructureNotion::FinitelyGenerated, limits)
}

/// Visits every structure up to `bound`, one per isomorphism class, by size
/// then canonical id; the first counterexample of each kind is reported.
fn check(class: &ClassSpec, bound: usize, notion: SubstructureNotion, limits: &Limits) -> Result<FitReport> {
    let mut report = FitReport {
        notion,
        bound,
        up_to_bound: true,
        nontrivial: false,
        non_member: None,
        finitely_testable: true,
        testability_counterexample: None,
        irrevocably_testable: true,
        irrevocability_counterexample: None,
        vacuous_substructure_warning: Vec::new(),
    };
    for k in 1..=bound {
        let mut reps = BTreeMap::new();
        for m in enumerate_structures(class.signature(), k, limits)? {
            let form = canonical_form(&m, limits)?;
            reps.entry(form.id.clone()).or_insert_with(|| form.apply(&m));
        }
        for m in reps.into_values() {
            let domains = substructure_domains(&m, notion)?;
            let proper: Vec<&Vec<usize>> = domains.iter().filter(|d| d.len() < m.size()).collect();
            if class.contains(&m)? {
                if report.irrevocability_counterexample.is_none() {
                    for d in proper {
                        if !class.contains(&m.induced(d)?)? {
                            report.irrevocably_testable = false;
                            report.irrevocability_counterexample = Some(IrrevocabilityWitness { member: m.clone(), substructure: d.clone() });
                            break;
                        }
                    }
                }
                continue;
            }
            report.nontrivial = true;
            if report.non_member.is_none() {
                report.non_member = Some(m.clone());
            }
            if proper.is_empty() && m.size() > 1 {
                report.vacuous_substructure_warning.push(m.clone());
            }
            if report.testability_counterexample.is_none() {
                let mut all_in = true;
                for d in &domains {
                    if !class.contains(&m.induced(d)?)? {
                        all_in = false;
                        break;
                    }
                }
                if all_in {
                    report.finitely_testable = false;
                    report.testability_counterexample = Some(m.clone());
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(src: &str) -> ClassSpec {
        ClassSpec::parse(src, None).unwrap()
    }

    #[test]
    fn acyclic_digraphs_pass() {
        let k = class("sig g { rel edge/2 }\naxiom forall x. !edge(x,x)\naxiom forall x,y. !(edge(x,y) & edge(y,x))\naxiom forall x,y,z. !(edge(x,y) & edge(y,z) & edge(z,x))\naxiom forall x,y,z,w. !(edge(x,y) & edge(y,z) & edge(z,w) & edge(w,x))");
        let r = check_fit(&k, 4, &Limits::default()).unwrap();
        assert!(r.is_fit(), "{r:?}");
        assert!(r.vacuous_substructure_warning.is_empty());
        let fg = check_fg_fit(&k, 4, &Limits::default()).unwrap();
        assert_eq!((fg.nontrivial, fg.finitely_testable, fg.irrevocably_testable), (r.nontrivial, r.finitely_testable, r.irrevocably_testable));
    }

    #[test]
    fn a_size_lower_bound_is_revocable() {
        let k = class("sig g { rel edge/2 }\naxiom exists x,y. x != y");
        for r in [check_fit(&k, 3, &Limits::default()).unwrap(), check_fg_fit(&k, 3, &Limits::default()).unwrap()] {
            assert!(!r.irrevocably_testable);
            let w = r.irrevocability_counterexample.unwrap();
            assert_eq!(w.member.size(), 2);
            assert_eq!(w.substructure().size(), 1);
        }
    }

    #[test]
    fn closed_loops_through_constants_are_flagged() {
        let k = class("sig s { fun f/1; fun g/1; const c }\naxiom forall x. g(x) != x");
        let r = check_fit(&k, 2, &Limits::default()).unwrap();
        assert!(r.finitely_testable && r.irrevocably_testable && r.nontrivial);
        assert!(!r.vacuous_substructure_warning.is_empty());
        for m in &r.vacuous_substructure_warning {
            assert!(!k.contains(m).unwrap());
            assert_eq!(closed_subsets(m, m.size()).len(), 1);
        }
        let fg = check_fg_fit(&k, 2, &Limits::default()).unwrap();
        assert_eq!(fg.vacuous_substructure_warning, r.vacuous_substructure_warning);
    }

    #[test]
    fn trivial_class_is_not_fit() {
        let k = class("sig g { rel edge/2 }\naxiom forall x. x = x");
        let r = check_fit(&k, 2, &Limits::default()).unwrap();
        assert!(!r.nontrivial && !r.is_fit());
    }
}
