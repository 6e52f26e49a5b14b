//! The universal sentences `VC_n(φ)`.

use crate::error::{Error, Result};
use crate::logic::{conj, Formula, PartitionedFormula, Term};

/// Largest `n` accepted by [`vc_sentence`].
pub const VC_SENTENCE_MAX: usize = 5;

fn subset_label(j: usize, n: usize) -> String {
    let members: String = (0..n).filter(|i| j >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
    if members.is_empty() {
        "0".to_string()
    } else {
        members
    }
}

/// `Shatter_φ((x_i), (y_J))`: for every `J ⊆ [n]` and `i`, `φ(x_i; y_J)`
/// when `i ∈ J` and `¬φ(x_i; y_J)` otherwise. Copies of object variable `v`
/// are named `v_i`; copies of parameter `w` are `w_J` with `J` spelled by
/// its members (`w_0` for the empty set).
pub fn shatter_formula(pf: &PartitionedFormula, n: usize) -> Result<(Formula, Vec<String>)> {
    if n > VC_SENTENCE_MAX {
        return Err(Error::budget("VC sentence size", n, VC_SENTENCE_MAX));
    }
    let mut vars = Vec::new();
    for i in 1..=n {
        for v in &pf.objects {
            vars.push(format!("{v}_{i}"));
        }
    }
    for j in 0..1usize << n {
        for w in &pf.params {
            vars.push(format!("{w}_{}", subset_label(j, n)));
        }
    }
    let mut parts = Vec::new();
    for j in 0..1usize << n {
        for i in 0..n {
            let mut inst = pf.formula.clone();
            // rename through temporaries so that substituted names never clash
            let slots = pf.slots();
            let temps: Vec<String> = (0..slots.len()).map(|k| format!("_t{k}")).collect();
            for (s, t) in slots.iter().zip(&temps) {
                inst = inst.substitute(s, &Term::Var(t.clone()));
            }
            for (k, t) in temps.iter().enumerate() {
                let target = if k < pf.objects.len() {
                    format!("{}_{}", pf.objects[k], i + 1)
                } else {
                    format!("{}_{}", pf.params[k - pf.objects.len()], subset_label(j, n))
                };
                inst = inst.substitute(t, &Term::Var(target));
            }
            parts.push(if j >> i & 1 == 1 { inst } else { Formula::not(inst) });
        }
    }
    Ok((conj(parts), vars))
}

/// `VC_n(φ) = ∀x̄ ∀ȳ ¬Shatter_φ`: no `n`-element set is shattered, so
/// `M ⊨ VC_n(φ)` exactly when the VC dimension of `φ` in `M` is below `n`.
pub fn vc_sentence(pf: &PartitionedFormula, n: usize) -> Result<Formula> {
    let (shatter, vars) = shatter_formula(pf, n)?;
    Ok(Formula::forall(&vars, Formula::not(shatter)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Limits;
    use crate::logic::{classify_syntax, parse_partitioned, satisfies};
    use crate::sigstruct::{enumerate_structures, Signature, Structure};
    use crate::vc::{incidence_graph, vc_dimension};
    use std::sync::Arc;

    #[test]
    fn vc_one_spelled_out() {
        let sig = Signature::new("g").with_relation("R", 2).unwrap();
        let pf = parse_partitioned("R(x;y)", Some(&sig)).unwrap().0;
        assert_eq!(vc_sentence(&pf, 1).unwrap().to_string(), "forall x_1,y_0,y_1. !(!R(x_1,y_0) & R(x_1,y_1))");
    }

    #[test]
    fn universal_for_quantifier_free_formulas() {
        let sig = Signature::new("g").with_relation("R", 2).unwrap();
        let pf = parse_partitioned("[x ; y] R(x,y) & !R(y,x)", Some(&sig)).unwrap().0;
        let f = vc_sentence(&pf, 2).unwrap();
        assert!(classify_syntax(&f).unwrap().universal);
    }

    #[test]
    fn agrees_with_vc_dimension_on_small_digraphs() {
        let sig = Arc::new(Signature::new("g").with_relation("R", 2).unwrap());
        let pf = parse_partitioned("R(x;y)", Some(&sig)).unwrap().0;
        let limits = Limits::default();
        let sentences: Vec<_> = (1..=2).map(|n| vc_sentence(&pf, n).unwrap()).collect();
        for size in 1..=3 {
            for m in enumerate_structures(&sig, size, &limits).unwrap() {
                let d = vc_dimension(&m, &pf, 3, &limits).unwrap().value();
                for (n, s) in (1..).zip(&sentences) {
                    assert_eq!(satisfies(&m, s).unwrap(), d < n);
                }
            }
        }
    }

    #[test]
    fn incidence_graph_violates_and_loop_satisfies() {
        let g = incidence_graph(2).unwrap();
        let pf = parse_partitioned("R(x;y)", Some(g.signature())).unwrap().0;
        assert!(!satisfies(&g, &vc_sentence(&pf, 2).unwrap()).unwrap());
        let mut loop1 = Structure::with_size(g.signature_arc().clone(), 1).unwrap();
        loop1.set(0, &[0, 0], true);
        assert!(satisfies(&loop1, &vc_sentence(&pf, 2).unwrap()).unwrap());
    }

    #[test]
    fn size_is_capped() {
        let sig = Signature::new("g").with_relation("R", 2).unwrap();
        let pf = parse_partitioned("R(x;y)", Some(&sig)).unwrap().0;
        assert!(vc_sentence(&pf, 6).unwrap_err().is_budget());
    }
}
