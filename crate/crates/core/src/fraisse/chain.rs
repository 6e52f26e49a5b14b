//! Finite generic chains: structures grown one point at a time until every
//! small one-point extension problem is solved inside them.

use std::cell::Cell;
use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::falsify::ClassSpec;
use crate::sigstruct::{for_each_combination, tuples, Morphism, Signature, Structure};

use super::search::{Oracle, Slot};

/// One point added to the chain, and the problem it solved.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stage {
    /// Domain size after the point was added.
    pub size: usize,
    /// The subset the new point extends.
    pub base: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainState {
    #[serde(serialize_with = "crate::sigstruct::serialize_text")]
    pub structure: Structure,
    /// Requested saturation level.
    pub level: usize,
    /// Largest `l ≤ level` such that every one-point extension problem over a
    /// subset of fewer than `l` elements is solved.
    pub saturated: usize,
    pub seed: u64,
    pub stages: Vec<Stage>,
}

impl ChainState {
    pub fn is_saturated(&self) -> bool {
        self.saturated == self.level
    }

    /// The structure after stage `i`; stage 0 is the starting point.
    pub fn stage(&self, i: usize) -> Structure {
        let size = if i == 0 { self.structure.size() - self.stages.len() } else { self.stages[i - 1].size };
        self.structure.induced_unchecked(&(0..size).collect::<Vec<_>>())
    }

    /// Inclusion of stage `i` into stage `i + 1`.
    pub fn embedding(&self, i: usize) -> Morphism {
        Morphism::identity(self.stage(i).size())
    }
}

/// The relation cells of a `(k+1)`-element structure that mention its last element.
fn cells_through_last(sig: &Signature, k: usize) -> Vec<Slot> {
    let mut out = Vec::new();
    for (r, sym) in sig.relations().iter().enumerate() {
        for t in tuples(k + 1, sym.arity) {
            if t.contains(&k) {
                out.push((r, t));
            }
        }
    }
    out
}

/// Type of `c` over the ordered subset `a`: the values of the cells through `c`.
fn type_over(m: &Structure, a: &[usize], c: usize, cells: &[Slot]) -> Vec<bool> {
    let at = |i: usize| if i == a.len() { c } else { a[i] };
    cells.iter().map(|(r, t)| m.holds(*r, &t.iter().map(|&i| at(i)).collect::<Vec<_>>())).collect()
}

/// Grows a structure in `class` by solving one-point extension problems: for
/// every subset `A` of fewer than `level` elements and every one-point
/// extension of `A` in the class, some element must realize it over `A`.
/// Problems are taken by subset size, then subset, then type; an unrealized
/// type gets a new point whose remaining cells are chosen by amalgamation,
/// with `seed` deciding which value is tried first. Growth stops at
/// `limits.chain_size` elements, in which case the state reports the level
/// actually reached.
pub fn generic_chain(class: &ClassSpec, level: usize, seed: u64, limits: &Limits) -> Result<ChainState> {
    if level == 0 {
        return Err(Error::Invalid("the saturation level must be at least 1".into()));
    }
    let local = class.max_member_size().unwrap_or(level).max(level);
    let oracle = Oracle::new(class)?.locally(local);
    let sig = class.signature().clone();
    let start = class
        .members_of_size(1, limits)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::ExtensionUnsolvable(format!("class `{}` has no one-element member", class.name)))?;
    let mut m = start;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stages = Vec::new();
    let mut solved: HashSet<Vec<usize>> = HashSet::new();
    let mut types: HashMap<Vec<Vec<bool>>, Vec<Vec<bool>>> = HashMap::new();
    let nodes = Cell::new(0);
    loop {
        let Some((a, t)) = first_unsolved(class, &m, level, &mut solved, &mut types, limits)? else {
            return Ok(ChainState { structure: m, level, saturated: level, seed, stages });
        };
        if m.size() >= limits.chain_size {
            return Ok(ChainState { structure: m, level, saturated: a.len(), seed, stages });
        }
        let p = m.size();
        let mut next = Structure::with_size(sig.clone(), p + 1)?;
        let mut free = Vec::new();
        let mut inside = vec![false; p + 1];
        for &e in &a {
            inside[e] = true;
        }
        inside[p] = true;
        for (r, sym) in sig.relations().iter().enumerate() {
            for tup in tuples(p, sym.arity) {
                next.set(r, &tup, m.holds(r, &tup));
            }
            for tup in tuples(p + 1, sym.arity) {
                if tup.contains(&p) && !tup.iter().all(|&e| inside[e]) {
                    free.push((r, tup));
                }
            }
        }
        let pattern = cells_through_last(&sig, a.len());
        for ((r, tup), v) in pattern.iter().zip(&t) {
            let image: Vec<usize> = tup.iter().map(|&i| if i == a.len() { p } else { a[i] }).collect();
            next.set(*r, &image, *v);
        }
        let prefs: Vec<bool> = (0..free.len()).map(|_| rng.gen()).collect();
        let mut new = vec![false; p + 1];
        new[p] = true;
        if !oracle.complete(&mut next, &free, &[p], &new, &|i| prefs[i], limits, &nodes)? {
            return Err(Error::ExtensionUnsolvable(format!(
                "no member extends the current {}-element structure by a point of type {:?} over {:?}",
                p, t, a
            )));
        }
        m = next;
        stages.push(Stage { size: p + 1, base: a });
    }
}

/// First unrealized (subset, type) pair, or `None` when the structure is closed.
fn first_unsolved(
    class: &ClassSpec,
    m: &Structure,
    level: usize,
    solved: &mut HashSet<Vec<usize>>,
    types: &mut HashMap<Vec<Vec<bool>>, Vec<Vec<bool>>>,
    limits: &Limits,
) -> Result<Option<(Vec<usize>, Vec<bool>)>> {
    for k in 0..level.min(m.size() + 1) {
        let mut found = None;
        let mut err = None;
        for_each_combination(m.size(), k, |a| {
            if found.is_some() || err.is_some() || solved.contains(a) {
                return;
            }
            let sub = if k == 0 { None } else { Some(m.induced_unchecked(a)) };
            let key: Vec<Vec<bool>> = match &sub {
                Some(s) => (0..s.signature().relations().len()).map(|r| s.relation_table(r).to_vec()).collect(),
                None => Vec::new(),
            };
            if !types.contains_key(&key) {
                match extension_types(class, sub.as_ref(), limits) {
                    Ok(ts) => {
                        types.insert(key.clone(), ts);
                    }
                    Err(e) => {
                        err = Some(e);
                        return;
                    }
                }
            }
            let wanted = &types[&key];
            let cells = cells_through_last(m.signature(), k);
            let realized: HashSet<Vec<bool>> = (0..m.size()).filter(|c| !a.contains(c)).map(|c| type_over(m, a, c, &cells)).collect();
            match wanted.iter().find(|t| !realized.contains(*t)) {
                Some(t) => found = Some((a.to_vec(), t.clone())),
                None => {
                    solved.insert(a.to_vec());
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// The one-point extensions of `a` (or of the empty structure) lying in the
/// class, as value vectors over the cells through the new point, ascending.
fn extension_types(class: &ClassSpec, a: Option<&Structure>, limits: &Limits) -> Result<Vec<Vec<bool>>> {
    let sig = class.signature().clone();
    let k = a.map_or(0, Structure::size);
    let mut ext = Structure::with_size(sig.clone(), k + 1)?;
    if let Some(a) = a {
        for (r, sym) in sig.relations().iter().enumerate() {
            for t in tuples(k, sym.arity) {
                ext.set(r, &t, a.holds(r, &t));
            }
        }
    }
    let cells = cells_through_last(&sig, k);
    if cells.len() >= 32 || (1u64 << cells.len()) > limits.enumeration {
        return Err(Error::budget("one-point extension types", format!("2^{}", cells.len()), limits.enumeration));
    }
    let mut out = Vec::new();
    for mask in 0..1u64 << cells.len() {
        let t: Vec<bool> = (0..cells.len()).map(|i| mask >> i & 1 == 1).collect();
        for ((r, tup), v) in cells.iter().zip(&t) {
            ext.set(*r, tup, *v);
        }
        if class.contains(&ext)? {
            out.push(t);
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraisse::{age_up_to, time_indexed_theory};
    use crate::logic::Theory;
    use crate::sigstruct::{canonical_form, enumerate_structures};
    use std::collections::BTreeSet;

    fn digraphs() -> ClassSpec {
        ClassSpec::intensional(Theory::parse("digraphs", "sig g { rel R/2 }").unwrap())
    }

    #[test]
    fn digraph_chain_satisfies_the_small_extension_axioms() {
        let limits = Limits::default();
        let c = generic_chain(&digraphs(), 2, 7, &limits).unwrap();
        assert!(c.is_saturated());
        let m = &c.structure;
        for a in 0..m.size() {
            let mut seen = BTreeSet::new();
            for b in (0..m.size()).filter(|&b| b != a) {
                seen.insert((m.holds(0, &[a, b]), m.holds(0, &[b, a]), m.holds(0, &[b, b])));
            }
            assert_eq!(seen.len(), 8, "point {a}");
        }
        let small = age_up_to(m, 2, &limits).unwrap();
        let all: BTreeSet<_> = (1..=2)
            .flat_map(|k| enumerate_structures(digraphs().signature(), k, &limits).unwrap())
            .map(|s| canonical_form(&s, &limits).unwrap().id)
            .collect();
        assert_eq!(small, all);
    }

    #[test]
    fn chains_are_deterministic_and_grow_by_embeddings() {
        let limits = Limits::default();
        let a = generic_chain(&digraphs(), 2, 3, &limits).unwrap();
        let b = generic_chain(&digraphs(), 2, 3, &limits).unwrap();
        assert_eq!(a, b);
        for i in 0..a.stages.len() {
            assert!(a.embedding(i).is_embedding(&a.stage(i), &a.stage(i + 1)));
        }
    }

    #[test]
    fn linear_orders_stop_at_the_cap() {
        let t = Theory::parse("lo", "sig o { rel lt/2 }\nforall x. !lt(x,x)\nforall x,y,z. lt(x,y) & lt(y,z) -> lt(x,z)\nforall x,y. x = y | lt(x,y) | lt(y,x)").unwrap();
        let limits = Limits { chain_size: 12, ..Limits::default() };
        let c = generic_chain(&ClassSpec::intensional(t.clone()), 2, 1, &limits).unwrap();
        assert_eq!((c.structure.size(), c.saturated), (12, 1));
        assert!(t.is_model(&c.structure).unwrap());
    }

    #[test]
    fn time_indexed_chain_is_a_model() {
        let t = time_indexed_theory(&Signature::new("coin").with_relation("H", 1).unwrap(), false).unwrap();
        let limits = Limits { chain_size: 16, ..Limits::default() };
        let c = generic_chain(&ClassSpec::intensional(t.clone()), 2, 5, &limits).unwrap();
        assert!(t.is_model(&c.structure).unwrap());
        assert_eq!(c.saturated, 1);
    }

    #[test]
    fn failed_amalgamation_is_reported() {
        let t = Theory::parse(
            "short",
            "sig o { rel lt/2 }\nforall x. !lt(x,x)\nforall x,y,z. lt(x,y) & lt(y,z) -> lt(x,z)\nforall x,y. x = y | lt(x,y) | lt(y,x)\nforall x,y,z. x = y | y = z | x = z",
        )
        .unwrap();
        let k = ClassSpec::intensional(t);
        assert!(matches!(generic_chain(&k, 2, 0, &Limits::default()), Err(Error::ExtensionUnsolvable(_))));
        assert!(generic_chain(&k, 1, 0, &Limits::default()).unwrap().is_saturated());
    }
}
