//! Universal axiomatizations read off the small members of a class.

use std::collections::HashSet;

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::falsify::ClassSpec;
use crate::logic::{conj, disj, Formula, Term};
use crate::sigstruct::{tuples, Signature, Structure};

fn x(i: usize) -> Term {
    Term::Var(format!("x{}", i + 1))
}

fn var_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// `χ_n(x1..xn)`: the assigned set is closed under every function and
/// contains every constant. `⊤` for relational signatures.
pub fn synthesize_chi(sig: &Signature, n: usize) -> Result<Formula> {
    if n == 0 {
        return Err(Error::Invalid("χ_n needs n ≥ 1".into()));
    }
    let mut parts = Vec::new();
    for f in sig.functions() {
        for t in tuples(n, f.arity) {
            let app = Term::App(f.name.clone(), t.iter().map(|&i| x(i)).collect());
            parts.push(disj((0..n).map(|j| Formula::eq(app.clone(), x(j))).collect()));
        }
    }
    for c in sig.constants() {
        parts.push(disj((0..n).map(|i| Formula::eq(x(i), Term::Const(c.clone()))).collect()));
    }
    Ok(conj(parts))
}

/// Members of size `m`, one per labeling of `{0..m-1}`: the classes of
/// `K[n]` up to isomorphism over the named variables.
pub fn labeled_members(class: &ClassSpec, m: usize, limits: &Limits) -> Result<Vec<Structure>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let names: Vec<String> = (0..m).map(|i| i.to_string()).collect();
    for rep in class.members_of_size(m, limits)? {
        let mut err = None;
        crate::falsify::for_each_injection(m, m, &mut |perm| {
            match rep.relabel(perm).and_then(|s| s.with_names(names.clone())) {
                Ok(s) => {
                    if seen.insert(s.clone()) {
                        out.push(s);
                    }
                }
                Err(e) => err = Some(e),
            }
            false
        });
        if let Some(e) = err {
            return Err(e);
        }
        if out.len() as u64 > limits.enumeration {
            return Err(Error::budget("labeled members", out.len(), limits.enumeration));
        }
    }
    Ok(out)
}

/// Atomic diagram of `m` with element `e` named by variable `rep[e]`.
fn diagram(m: &Structure, rep: &[usize]) -> Vec<Formula> {
    let sig = m.signature();
    let mut lits = Vec::new();
    for (r, sym) in sig.relations().iter().enumerate() {
        for t in tuples(m.size(), sym.arity) {
            let atom = Formula::Rel(sym.name.clone(), t.iter().map(|&e| x(rep[e])).collect());
            lits.push(if m.holds(r, &t) { atom } else { Formula::not(atom) });
        }
    }
    for (f, sym) in sig.functions().iter().enumerate() {
        for t in tuples(m.size(), sym.arity) {
            let app = Term::App(sym.name.clone(), t.iter().map(|&e| x(rep[e])).collect());
            lits.push(Formula::eq(app, x(rep[m.apply(f, &t)])));
        }
    }
    for (c, name) in sig.constants().iter().enumerate() {
        lits.push(Formula::eq(Term::Const(name.clone()), x(rep[m.constant(c)])));
    }
    lits
}

/// Calls `f` on every restricted growth string of length `n`: a partition of
/// `0..n` into blocks numbered by first occurrence.
fn for_each_partition(n: usize, f: &mut dyn FnMut(&[usize], usize)) {
    fn go(cur: &mut Vec<usize>, n: usize, blocks: usize, f: &mut dyn FnMut(&[usize], usize)) {
        if cur.len() == n {
            return f(cur, blocks);
        }
        for b in 0..=blocks {
            cur.push(b);
            go(cur, n, blocks.max(b + 1), f);
            cur.pop();
        }
    }
    go(&mut Vec::with_capacity(n), n, 0, f);
}

/// `ψ_n` for the class.
///
/// Relational signatures get `∀x̄ (⋀ xi ≠ xj → ⋁ φ_M)` over the labeled
/// `n`-element members. Otherwise the guard is `χ_n` and the disjuncts range
/// over members of size at most `n` together with every pattern of equalities
/// among `x1..xn` that maps the variables onto the member. An empty class
/// gives the disjunction `false`.
pub fn synthesize_psi(class: &ClassSpec, n: usize, limits: &Limits) -> Result<Formula> {
    if n == 0 {
        return Err(Error::Invalid("ψ_n needs n ≥ 1".into()));
    }
    let sig = class.signature();
    let names = var_names(n);
    if sig.is_relational() {
        let identity: Vec<usize> = (0..n).collect();
        let disjuncts = labeled_members(class, n, limits)?.iter().map(|m| conj(diagram(m, &identity))).collect();
        let mut distinct = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                distinct.push(Formula::not(Formula::eq(x(i), x(j))));
            }
        }
        let body = if distinct.is_empty() { disj(disjuncts) } else { Formula::implies(conj(distinct), disj(disjuncts)) };
        return Ok(Formula::forall(&names, body));
    }
    let mut by_size = Vec::new();
    for m in 1..=n {
        by_size.push(labeled_members(class, m, limits)?);
    }
    let mut disjuncts = Vec::new();
    for_each_partition(n, &mut |blocks, count| {
        let mut rep = vec![usize::MAX; count];
        for (i, &b) in blocks.iter().enumerate() {
            if rep[b] == usize::MAX {
                rep[b] = i;
            }
        }
        let mut eqs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let e = Formula::eq(x(i), x(j));
                eqs.push(if blocks[i] == blocks[j] { e } else { Formula::not(e) });
            }
        }
        for m in &by_size[count - 1] {
            let mut lits = eqs.clone();
            lits.extend(diagram(m, &rep));
            disjuncts.push(conj(lits));
        }
    });
    Ok(Formula::forall(&names, Formula::implies(synthesize_chi(sig, n)?, disj(disjuncts))))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::logic::{classify_syntax, satisfies, Compiled};
    use crate::sigstruct::{closure, enumerate_structures};

    fn class(src: &str) -> ClassSpec {
        ClassSpec::parse(src, None).unwrap()
    }

    fn acyclic() -> ClassSpec {
        class("sig g { rel edge/2 }\naxiom forall x. !edge(x,x)\naxiom forall x,y. !(edge(x,y) & edge(y,x))")
    }

    #[test]
    fn chi_matches_the_displayed_formula() {
        let f = Signature::new("s").with_function("f", 1).unwrap();
        assert_eq!(synthesize_chi(&f, 2).unwrap().to_string(), "(f(x1) = x1 | f(x1) = x2) & (f(x2) = x1 | f(x2) = x2)");
        let c = Signature::new("s").with_constant("c").unwrap();
        assert_eq!(synthesize_chi(&c, 1).unwrap().to_string(), "x1 = c");
        let r = Signature::new("s").with_relation("R", 2).unwrap();
        assert_eq!(synthesize_chi(&r, 3).unwrap(), Formula::True);
    }

    #[test]
    fn chi_detects_closed_sets() {
        let sig = Arc::new(Signature::new("s").with_function("f", 1).unwrap().with_constant("c").unwrap());
        let limits = Limits::default();
        for n in 1..=2 {
            let chi = Compiled::with_free(&synthesize_chi(&sig, n).unwrap(), &sig, &var_names(n)).unwrap();
            for m in enumerate_structures(&sig, 3, &limits).unwrap() {
                for t in tuples(3, n) {
                    let mut set = t.clone();
                    set.sort_unstable();
                    set.dedup();
                    let closed = closure(&m, &set, 10).unwrap() == set;
                    assert_eq!(chi.eval(&m, &t), closed);
                }
            }
        }
    }

    #[test]
    fn psi_one_forbids_loops() {
        let psi = synthesize_psi(&acyclic(), 1, &Limits::default()).unwrap();
        assert_eq!(psi.to_string(), "forall x1. !edge(x1,x1)");
    }

    #[test]
    fn psi_two_admits_three_labeled_digraphs() {
        let k = acyclic();
        let limits = Limits::default();
        let psi = [synthesize_psi(&k, 1, &limits).unwrap(), synthesize_psi(&k, 2, &limits).unwrap()];
        let sig = k.signature().clone();
        let models = enumerate_structures(&sig, 2, &limits).unwrap().filter(|m| psi.iter().all(|p| satisfies(m, p).unwrap())).count();
        assert_eq!(models, 3);
        assert!(psi.iter().all(|p| classify_syntax(p).unwrap().universal));
    }

    #[test]
    fn unrestricted_psi_is_valid() {
        let k = class("sig g { rel edge/2 }\naxiom forall x. x = x");
        let psi = synthesize_psi(&k, 2, &Limits::default()).unwrap();
        for m in enumerate_structures(k.signature(), 2, &Limits::default()).unwrap() {
            assert!(satisfies(&m, &psi).unwrap());
        }
    }

    #[test]
    fn guarded_psi_axiomatizes_small_models() {
        let k = class("sig s { fun g/1; const c }\naxiom forall x. g(x) != x");
        let limits = Limits::default();
        let psis: Vec<Formula> = (1..=3).map(|n| synthesize_psi(&k, n, &limits).unwrap()).collect();
        for p in &psis {
            assert!(classify_syntax(p).unwrap().universal);
        }
        for size in 1..=3 {
            for m in enumerate_structures(k.signature(), size, &limits).unwrap() {
                let all = psis.iter().all(|p| satisfies(&m, p).unwrap());
                assert_eq!(all, k.contains(&m).unwrap(), "{}", m.to_text("m"));
            }
        }
    }

    #[test]
    fn empty_class_gives_false_disjunction() {
        let k = class("sig g { rel P/1 }\naxiom forall x. P(x) & !P(x)");
        let psi = synthesize_psi(&k, 1, &Limits::default()).unwrap();
        assert_eq!(psi.to_string(), "forall x1. false");
    }
}
