//! Completing partially specified structures inside a class.

use std::cell::Cell;

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::falsify::ClassSpec;
use crate::logic::{eval3, Partial, UniversalSentence};
use crate::sigstruct::{for_each_combination, tuple_index, Structure};

/// A relation cell: relation index and tuple.
pub(crate) type Slot = (usize, Vec<usize>);

/// Decides class membership, pruning partial structures when the class is
/// given by universal axioms.
pub(crate) struct Oracle<'a> {
    class: &'a ClassSpec,
    universal: Option<Vec<UniversalSentence>>,
    /// For extensional classes: a structure is accepted when all its
    /// substructures of at most this size through the new point are members.
    local: Option<usize>,
}

struct View<'a> {
    m: &'a Structure,
    known: &'a [Vec<bool>],
    env: &'a [Option<usize>],
}

impl Partial for View<'_> {
    fn var(&self, slot: usize) -> Option<usize> {
        self.env[slot]
    }
    fn constant(&self, _: usize) -> Option<usize> {
        None
    }
    fn apply(&self, _: usize, _: &[usize]) -> Option<usize> {
        None
    }
    fn atom(&self, r: usize, args: &[usize]) -> Option<bool> {
        let i = tuple_index(self.m.size(), args);
        self.known[r][i].then(|| self.m.relation_table(r)[i])
    }
}

impl<'a> Oracle<'a> {
    pub(crate) fn new(class: &'a ClassSpec) -> Result<Oracle<'a>> {
        if !class.signature().is_relational() {
            return Err(Error::Unsupported(format!("class `{}` has functions or constants; amalgamation search is relational only", class.name)));
        }
        let universal = match class.theory() {
            Some(t) if class.is_universal() => {
                Some(t.sentences.iter().map(|s| UniversalSentence::new(s, class.signature())).collect::<Result<Vec<_>>>()?)
            }
            _ => None,
        };
        Ok(Oracle { class, universal, local: None })
    }

    /// Membership of a structure grown point by point, judged by its
    /// substructures of at most `bound` elements.
    pub(crate) fn locally(mut self, bound: usize) -> Oracle<'a> {
        if self.universal.is_none() && self.class.theory().is_none() {
            self.local = Some(bound);
        }
        self
    }

    /// False when some axiom instance whose elements include all of
    /// `required` is already false.
    fn consistent(&self, m: &Structure, known: &[Vec<bool>], required: &[usize]) -> bool {
        let Some(us) = &self.universal else { return true };
        us.iter().all(|u| {
            let mut env = vec![None; u.vars.len()];
            !violated(u, m, known, required, &mut env, 0)
        })
    }

    fn accepts(&self, m: &Structure, new: &[bool]) -> Result<bool> {
        if self.universal.is_some() {
            return Ok(true);
        }
        match self.local {
            Some(bound) => {
                let fresh: Vec<usize> = (0..m.size()).filter(|&e| new[e]).collect();
                let old: Vec<usize> = (0..m.size()).filter(|&e| !new[e]).collect();
                let mut ok = true;
                let mut err = None;
                for extra in 0..=bound.saturating_sub(fresh.len()).min(old.len()) {
                    for_each_combination(old.len(), extra, |c| {
                        if !ok || err.is_some() {
                            return;
                        }
                        let mut dom: Vec<usize> = c.iter().map(|&i| old[i]).chain(fresh.iter().copied()).collect();
                        dom.sort_unstable();
                        match self.class.contains(&m.induced_unchecked(&dom)) {
                            Ok(b) => ok = b,
                            Err(e) => err = Some(e),
                        }
                    });
                }
                match err {
                    Some(e) => Err(e),
                    None => Ok(ok && fresh.len() <= bound),
                }
            }
            None => self.class.contains(m),
        }
    }

    /// Depth-first completion of `free` cells of `m`. Cells not in `free`
    /// are fixed, and axiom instances avoiding some element of `required`
    /// are assumed to hold already. `prefer(i)` is the value tried first for cell `i`. `new`
    /// marks the elements whose neighbourhood is being decided. Returns
    /// whether a member of the class was reached; `m` then holds it.
    pub(crate) fn complete(
        &self,
        m: &mut Structure,
        free: &[Slot],
        required: &[usize],
        new: &[bool],
        prefer: &dyn Fn(usize) -> bool,
        limits: &Limits,
        nodes: &Cell<u64>,
    ) -> Result<bool> {
        let sig = m.signature_arc().clone();
        let n = m.size();
        let mut known: Vec<Vec<bool>> = sig.relations().iter().map(|r| vec![true; n.pow(r.arity as u32)]).collect();
        for (r, t) in free {
            known[*r][tuple_index(n, t)] = false;
        }
        if !self.consistent(m, &known, required) {
            return Ok(false);
        }
        self.dfs(m, &mut known, free, 0, new, prefer, limits, nodes)
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        m: &mut Structure,
        known: &mut [Vec<bool>],
        free: &[Slot],
        depth: usize,
        new: &[bool],
        prefer: &dyn Fn(usize) -> bool,
        limits: &Limits,
        nodes: &Cell<u64>,
    ) -> Result<bool> {
        if depth == free.len() {
            return self.accepts(m, new);
        }
        let (r, t) = &free[depth];
        let idx = tuple_index(m.size(), t);
        let mut touch = t.clone();
        touch.sort_unstable();
        touch.dedup();
        let first = prefer(depth);
        for value in [first, !first] {
            nodes.set(nodes.get() + 1);
            if nodes.get() > limits.search_nodes {
                return Err(Error::budget("amalgam search", format!("more than {} nodes", limits.search_nodes), limits.search_nodes));
            }
            m.set(*r, t, value);
            known[*r][idx] = true;
            if self.consistent(m, known, &touch) && self.dfs(m, known, free, depth + 1, new, prefer, limits, nodes)? {
                return Ok(true);
            }
            known[*r][idx] = false;
        }
        m.set(*r, t, false);
        Ok(false)
    }
}

/// Searches assignments whose values cover `required`, pruning on partial
/// truth.
fn violated(u: &UniversalSentence, m: &Structure, known: &[Vec<bool>], required: &[usize], env: &mut [Option<usize>], depth: usize) -> bool {
    let missing = required.iter().filter(|&&e| !env[..depth].contains(&Some(e))).count();
    if missing > env.len() - depth {
        return false;
    }
    match eval3(&u.matrix, &View { m, known, env }) {
        Some(true) => return false,
        Some(false) if missing == 0 => return true,
        _ => {}
    }
    if depth == env.len() {
        return false;
    }
    for e in 0..m.size() {
        env[depth] = Some(e);
        if violated(u, m, known, required, env, depth + 1) {
            env[depth] = None;
            return true;
        }
    }
    env[depth] = None;
    false
}

/// Every embedding of `a` into `b` (relational signatures), in
/// lexicographic order of the maps. Stops when `f` returns true.
pub(crate) fn for_each_embedding(a: &Structure, b: &Structure, f: &mut dyn FnMut(&[usize]) -> bool) {
    let mut map = Vec::with_capacity(a.size());
    let mut used = vec![false; b.size()];
    embed(a, b, &mut map, &mut used, f);
}

fn embed(a: &Structure, b: &Structure, map: &mut Vec<usize>, used: &mut [bool], f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    let i = map.len();
    if i == a.size() {
        return f(map);
    }
    for e in 0..b.size() {
        if used[e] {
            continue;
        }
        map.push(e);
        if agrees_at(a, b, map) {
            used[e] = true;
            if embed(a, b, map, used, f) {
                return true;
            }
            used[e] = false;
        }
        map.pop();
    }
    false
}

/// Whether every tuple over the mapped prefix that involves its last element
/// has the same truth value in `a` and under the map in `b`.
fn agrees_at(a: &Structure, b: &Structure, map: &[usize]) -> bool {
    let last = map.len() - 1;
    let k = map.len();
    for (r, sym) in a.signature().relations().iter().enumerate() {
        let mut ok = true;
        crate::sigstruct::tuples(k, sym.arity).filter(|t| t.contains(&last)).for_each(|t| {
            if ok {
                let image: Vec<usize> = t.iter().map(|&x| map[x]).collect();
                ok = a.holds(r, &t) == b.holds(r, &image);
            }
        });
        if !ok {
            return false;
        }
    }
    true
}

pub(crate) fn embeddings(a: &Structure, b: &Structure) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_embedding(a, b, &mut |m| {
        out.push(m.to_vec());
        false
    });
    out
}
