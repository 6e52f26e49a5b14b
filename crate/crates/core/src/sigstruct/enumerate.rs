use std::collections::BTreeSet;
use std::sync::Arc;

use crate::config::Limits;
use crate::error::{Error, Result};

use super::signature::Signature;
use super::structure::{default_names, tuples, Structure};

/// Number of structures on a domain of size `n`, or `None` on overflow.
pub fn count_structures(sig: &Signature, n: usize) -> Option<u128> {
    let n128 = n as u128;
    let mut total: u128 = 1;
    for r in sig.relations() {
        let cells = n128.checked_pow(r.arity as u32)?;
        total = total.checked_mul(2u128.checked_pow(u32::try_from(cells).ok()?)?)?;
    }
    for f in sig.functions() {
        let cells = n128.checked_pow(f.arity as u32)?;
        total = total.checked_mul(n128.checked_pow(u32::try_from(cells).ok()?)?)?;
    }
    for _ in sig.constants() {
        total = total.checked_mul(n128)?;
    }
    Some(total)
}

/// Every structure on `{0..n-1}`, each exactly once.
///
/// The order is a mixed-radix counter whose least significant digit is the
/// first tuple of the first relation. Relation cells come first (in signature
/// order, tuples lexicographic), then function cells, then constants. The
/// first structure yielded has all relations empty and every function and
/// constant equal to `0`.
pub fn enumerate_structures(sig: &Arc<Signature>, n: usize, limits: &Limits) -> Result<StructureIter> {
    if n == 0 {
        return Err(Error::EmptyDomain);
    }
    match count_structures(sig, n) {
        Some(c) if c <= limits.enumeration as u128 => {}
        Some(c) => return Err(Error::budget(format!("enumerating {}-element structures", n), c, limits.enumeration)),
        None => return Err(Error::budget(format!("enumerating {}-element structures", n), "more than 2^128", limits.enumeration)),
    }
    Ok(StructureIter { current: Structure::blank(sig.clone(), default_names(n)), started: false, done: false })
}

pub struct StructureIter {
    current: Structure,
    started: bool,
    done: bool,
}

impl StructureIter {
    fn advance(&mut self) -> bool {
        let n = self.current.size();
        let sig = self.current.signature_arc().clone();
        for r in 0..sig.relations().len() {
            for cell in self.current.relation_table_mut(r) {
                if *cell {
                    *cell = false;
                } else {
                    *cell = true;
                    return true;
                }
            }
        }
        for f in 0..sig.functions().len() {
            for cell in self.current.function_table_mut(f) {
                if *cell + 1 < n {
                    *cell += 1;
                    return true;
                }
                *cell = 0;
            }
        }
        for c in 0..sig.constants().len() {
            let v = self.current.constant(c);
            if v + 1 < n {
                self.current.set_constant(c, v + 1);
                return true;
            }
            self.current.set_constant(c, 0);
        }
        false
    }
}

impl Iterator for StructureIter {
    type Item = Structure;

    fn next(&mut self) -> Option<Structure> {
        if self.done {
            return None;
        }
        if self.started && !self.advance() {
            self.done = true;
            return None;
        }
        self.started = true;
        Some(self.current.clone())
    }
}

/// Domains of the substructures of `m` with at most `k` elements, by size and
/// then lexicographically.
pub fn closed_subsets(m: &Structure, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in 1..=k.min(m.size()) {
        for_each_combination(m.size(), size, |c| {
            if m.is_closed(c) {
                out.push(c.to_vec());
            }
        });
    }
    out
}

/// All substructures of `m` with at most `k` elements, in the order of [`closed_subsets`].
pub fn substructures(m: &Structure, k: usize) -> Vec<Structure> {
    closed_subsets(m, k).iter().map(|s| m.induced_unchecked(s)).collect()
}

/// Closure of `seed` together with the constants under every function, sorted.
pub fn closure(m: &Structure, seed: &[usize], cap: usize) -> Result<Vec<usize>> {
    if seed.is_empty() && m.constants().is_empty() {
        return Err(Error::EmptyDomain);
    }
    if let Some(&bad) = seed.iter().find(|&&e| e >= m.size()) {
        return Err(Error::Invalid(format!("element {bad} is outside the domain")));
    }
    let mut set: BTreeSet<usize> = seed.iter().copied().chain(m.constants().iter().copied()).collect();
    let sig = m.signature();
    let mut rounds = 0;
    loop {
        let members: Vec<usize> = set.iter().copied().collect();
        let before = set.len();
        for (f, sym) in sig.functions().iter().enumerate() {
            for t in tuples(members.len(), sym.arity) {
                let args: Vec<usize> = t.iter().map(|&i| members[i]).collect();
                set.insert(m.apply(f, &args));
            }
        }
        if set.len() == before {
            return Ok(set.into_iter().collect());
        }
        rounds += 1;
        if rounds > cap {
            return Err(Error::CapExceeded(cap));
        }
    }
}

/// The substructure generated by `seed`.
pub fn generated_substructure(m: &Structure, seed: &[usize], cap: usize) -> Result<Structure> {
    let dom = closure(m, seed, cap)?;
    Ok(m.induced_unchecked(&dom))
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        f(&c);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(f: impl FnOnce(Signature) -> Result<Signature>) -> Arc<Signature> {
        Arc::new(f(Signature::new("t")).unwrap())
    }

    #[test]
    fn counts_match_closed_forms() {
        let limits = Limits::default();
        let h = sig(|s| s.with_relation("H", 1));
        let all: Vec<_> = enumerate_structures(&h, 1, &limits).unwrap().collect();
        assert_eq!(all.len(), 2);
        assert!(!all[0].holds(0, &[0]));
        assert!(all[1].holds(0, &[0]));
        let r = sig(|s| s.with_relation("R", 2));
        assert_eq!(enumerate_structures(&r, 2, &limits).unwrap().count(), 16);
        let f = sig(|s| s.with_function("f", 1));
        assert_eq!(enumerate_structures(&f, 2, &limits).unwrap().count(), 4);
        let c = sig(|s| s.with_function("f", 2)?.with_constant("c"));
        assert_eq!(enumerate_structures(&c, 2, &limits).unwrap().count(), 32);
    }

    #[test]
    fn enumeration_has_no_duplicates() {
        let s = sig(|s| s.with_relation("R", 2)?.with_function("f", 1));
        let all: BTreeSet<Vec<String>> = enumerate_structures(&s, 2, &Limits::default())
            .unwrap()
            .map(|m| vec![m.to_text("m")])
            .collect();
        assert_eq!(all.len(), 64);
    }

    #[test]
    fn budget_is_enforced() {
        let r = sig(|s| s.with_relation("R", 2));
        let tight = Limits::default().with_enumeration(1000);
        assert!(matches!(enumerate_structures(&r, 4, &tight), Err(e) if e.is_budget()));
    }

    #[test]
    fn substructures_of_cycle_and_successor() {
        let r = sig(|s| s.with_relation("edge", 2));
        let mut c3 = Structure::with_size(r, 3).unwrap();
        for i in 0..3 {
            c3.set(0, &[i, (i + 1) % 3], true);
        }
        assert_eq!(substructures(&c3, 2).len(), 6);
        assert_eq!(substructures(&c3, 3).last().unwrap(), &c3);

        let f = sig(|s| s.with_function("f", 1));
        let mut succ = Structure::with_size(f, 3).unwrap();
        for i in 0..3 {
            succ.set_function(0, &[i], (i + 1) % 3);
        }
        assert!(substructures(&succ, 2).is_empty());
        assert_eq!(generated_substructure(&succ, &[0], 10).unwrap(), succ);
    }

    #[test]
    fn generated_substructure_is_idempotent() {
        let f = sig(|s| s.with_function("f", 1));
        let mut m = Structure::with_size(f, 4).unwrap();
        for (a, b) in [(0, 1), (1, 1), (2, 3), (3, 2)] {
            m.set_function(0, &[a], b);
        }
        let g = generated_substructure(&m, &[0], 10).unwrap();
        assert_eq!(g.size(), 2);
        let all: Vec<usize> = (0..g.size()).collect();
        assert_eq!(generated_substructure(&g, &all, 10).unwrap(), g);
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, |c| seen.push(c.to_vec()));
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        let mut count = 0;
        for_each_combination(3, 0, |_| count += 1);
        assert_eq!(count, 1);
    }
}
