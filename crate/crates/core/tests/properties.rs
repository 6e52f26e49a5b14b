use std::collections::HashSet;
use std::sync::Arc;

use proptest::prelude::*;

use falsilab::falsify::{refute, GroundLiteral, ObservationSet, Verdict};
use falsilab::fraisse::age;
use falsilab::logic::{classify_syntax, miniscope, nnf, parse_formula, satisfies, simplify, to_prenex, Formula, Quantifier, Term};
use falsilab::sigstruct::text::parse_document_with;
use falsilab::sigstruct::{canonical_form, isomorphic, Structure};
use falsilab::vc::vc_dimension;
use falsilab::{Limits, Signature, Theory};

fn sig() -> Arc<Signature> {
    Arc::new(Signature::new("g").with_relation("E", 2).unwrap().with_relation("P", 1).unwrap())
}

fn structure(max: usize) -> impl Strategy<Value = Structure> {
    (1..=max).prop_flat_map(|n| {
        (Just(n), prop::collection::vec(any::<bool>(), n * n), prop::collection::vec(any::<bool>(), n)).prop_map(|(n, e, p)| {
            let mut m = Structure::with_size(sig(), n).unwrap();
            for i in 0..n {
                for j in 0..n {
                    m.set(0, &[i, j], e[i * n + j]);
                }
                m.set(1, &[i], p[i]);
            }
            m
        })
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

/// Tries every bijection.
fn brute_isomorphic(a: &Structure, b: &Structure) -> bool {
    fn go(a: &Structure, b: &Structure, map: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let n = a.size();
        if map.len() == n {
            return (0..n).all(|i| a.holds(1, &[i]) == b.holds(1, &[map[i]]))
                && (0..n).all(|i| (0..n).all(|j| a.holds(0, &[i, j]) == b.holds(0, &[map[i], map[j]])));
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                map.push(v);
                let found = go(a, b, map, used);
                map.pop();
                used[v] = false;
                if found {
                    return true;
                }
            }
        }
        false
    }
    a.size() == b.size() && go(a, b, &mut Vec::new(), &mut vec![false; b.size()])
}

const VARS: [&str; 3] = ["x", "y", "z"];

fn atom() -> impl Strategy<Value = Formula> {
    let v = || prop::sample::select(&VARS[..]);
    prop_oneof![
        (v(), v()).prop_map(|(a, b)| Formula::rel("E", &[a, b])),
        v().prop_map(|a| Formula::rel("P", &[a])),
        (v(), v()).prop_map(|(a, b)| Formula::eq(Term::var(a), Term::var(b))),
    ]
}

fn formula() -> impl Strategy<Value = Formula> {
    atom().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Formula::Or),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
            (prop::sample::select(&VARS[..]), any::<bool>(), inner).prop_map(|(v, all, f)| {
                let q = if all { Quantifier::Forall } else { Quantifier::Exists };
                Formula::Quant(q, vec![v.to_string()], Box::new(f))
            }),
        ]
    })
}

fn sentence() -> impl Strategy<Value = Formula> {
    formula().prop_map(|f| {
        let free = f.free_vars();
        if free.is_empty() {
            f
        } else {
            Formula::forall(&free, f)
        }
    })
}

/// `∀x̄ ¬(a₁ ∧ … ∧ aₖ)` with atoms over `x, y, z`.
fn uncaf() -> impl Strategy<Value = Formula> {
    prop::collection::vec(atom(), 1..=4).prop_map(|atoms| Formula::forall(&VARS.map(String::from), Formula::not(Formula::And(atoms))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn canonical_form_ignores_labels((m, perm) in structure(5).prop_flat_map(|m| { let n = m.size(); (Just(m), permutation(n)) })) {
        let limits = Limits::default();
        let r = m.relabel(&perm).unwrap();
        prop_assert_eq!(canonical_form(&m, &limits).unwrap().id, canonical_form(&r, &limits).unwrap().id);
        let iso = isomorphic(&m, &r).unwrap().expect("relabeling is an isomorphism");
        prop_assert!(iso.is_embedding(&m, &r));
    }

    #[test]
    fn canonical_forms_agree_with_brute_force(a in structure(4), b in structure(4)) {
        let limits = Limits::default();
        let same = canonical_form(&a, &limits).unwrap().id == canonical_form(&b, &limits).unwrap().id;
        prop_assert_eq!(same, brute_isomorphic(&a, &b));
    }

    #[test]
    fn printed_formulas_parse_back(f in sentence(), m in structure(3)) {
        // the parser may rename shadowed binders, so compare meaning and then a fixed point
        let g = parse_formula(&f.to_string(), &sig()).unwrap();
        prop_assert_eq!(satisfies(&m, &g).unwrap(), satisfies(&m, &f).unwrap());
        let text = g.to_string();
        prop_assert_eq!(parse_formula(&text, &sig()).unwrap().to_string(), text);
    }

    #[test]
    fn normal_forms_preserve_truth(f in sentence(), m in structure(3)) {
        let truth = satisfies(&m, &f).unwrap();
        prop_assert_eq!(satisfies(&m, &nnf(&f)).unwrap(), truth);
        prop_assert_eq!(satisfies(&m, &simplify(&f)).unwrap(), truth);
        prop_assert_eq!(satisfies(&m, &miniscope(&nnf(&f))).unwrap(), truth);
        let p = to_prenex(&f);
        prop_assert!(classify_syntax(&p).unwrap().prenex.first.is_none() || p.is_sentence());
        prop_assert_eq!(satisfies(&m, &p).unwrap(), truth);
    }

    #[test]
    fn uncaf_sentences_pass_to_substructures(f in uncaf(), m in structure(4), keep in prop::collection::vec(any::<bool>(), 4)) {
        prop_assert!(classify_syntax(&f).unwrap().uncaf);
        let subset: Vec<usize> = (0..m.size()).filter(|&i| keep[i]).collect();
        prop_assume!(!subset.is_empty());
        if satisfies(&m, &f).unwrap() {
            prop_assert!(satisfies(&m.induced(&subset).unwrap(), &f).unwrap());
        }
    }

    #[test]
    fn structures_print_and_parse_back(m in structure(4)) {
        let doc = parse_document_with(&m.to_text("M"), &[sig()]).unwrap();
        let back = doc.only_structure().unwrap();
        prop_assert_eq!(back.to_text("M"), m.to_text("M"));
    }

    #[test]
    fn age_is_closed_under_substructures(m in structure(4)) {
        let limits = Limits::default();
        let a = age(&m, &limits).unwrap();
        for sub in falsilab::sigstruct::substructures(&m, m.size()) {
            if sub.size() > 0 {
                prop_assert!(age(&sub, &limits).unwrap().is_subset(&a));
            }
        }
    }

    #[test]
    fn vc_dimension_is_bounded_by_parameter_count(m in structure(5)) {
        let limits = Limits::default();
        let pf = falsilab::logic::parse_partitioned("E(x;y)", Some(m.signature())).unwrap().0;
        let d = vc_dimension(&m, &pf, 5, &limits).unwrap();
        prop_assert!(d.is_exact());
        prop_assert!(1usize << d.value() <= m.size());
        let traces: HashSet<Vec<bool>> = (0..m.size()).map(|y| (0..m.size()).map(|x| m.holds(0, &[x, y])).collect()).collect();
        prop_assert!(d.value() == 0 || traces.len() >= 2);
    }

    #[test]
    fn refutation_survives_more_observations(
        edges in prop::collection::vec((0usize..3, 0usize..3), 1..6),
        extra in prop::collection::vec((0usize..3, 0usize..3, any::<bool>()), 0..4),
    ) {
        let t = Theory::parse("asym", "sig g { rel E/2; rel P/1 }\nforall x,y. !(E(x,y) & E(y,x))\n").unwrap();
        let names = ["a", "b", "c"];
        let lits: Vec<GroundLiteral> = edges.iter().map(|&(i, j)| GroundLiteral::new("E", &[names[i], names[j]], true)).collect();
        let obs = ObservationSet::new(&names, lits).unwrap();
        let first = refute(&t, &obs).unwrap().verdict;
        let mut more = obs.clone();
        for &(i, j, pos) in &extra {
            match more.with(GroundLiteral::new("E", &[names[i], names[j]], pos)) {
                Ok(o) => more = o,
                Err(_) => continue,
            }
        }
        if first == Verdict::Refuted {
            prop_assert_eq!(refute(&t, &more).unwrap().verdict, Verdict::Refuted);
        }
    }
}
