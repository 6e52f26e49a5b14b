//! Shattering and VC dimension of partitioned formulas over finite structures.

use std::sync::Arc;

use serde::Serialize;

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::logic::{Compiled, PartitionedFormula};
use crate::sigstruct::{tuple_at, Signature, Structure};

/// Largest set whose subsets are enumerated.
pub const SHATTER_SOFT_CAP: usize = 20;

/// `params[J]` realizes the subset of `set` selected by the bits of `J`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShatterWitness {
    pub set: Vec<Vec<usize>>,
    pub params: Vec<Vec<usize>>,
}

impl ShatterWitness {
    /// Re-evaluates `M ⊨ φ(x; y_J) ⟺ x ∈ J` for every `x` and `J`.
    pub fn verify(&self, m: &Structure, pf: &PartitionedFormula) -> Result<bool> {
        let phi = Compiled::with_free(&pf.formula, m.signature(), &pf.slots())?;
        for (j, y) in self.params.iter().enumerate() {
            for (i, x) in self.set.iter().enumerate() {
                let args: Vec<usize> = x.iter().chain(y).copied().collect();
                if phi.eval(m, &args) != (j >> i & 1 == 1) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Truth table of `φ(x̄; ȳ)` on `M`: one row per parameter tuple, one bit
/// per object tuple, both in lexicographic order.
pub struct TraceMatrix {
    objects: usize,
    object_arity: usize,
    param_arity: usize,
    size: usize,
    rows: Vec<Vec<u64>>,
}

impl TraceMatrix {
    pub fn new(m: &Structure, pf: &PartitionedFormula, limits: &Limits) -> Result<TraceMatrix> {
        let n = m.size();
        let count = |k: usize, what: &str| -> Result<usize> {
            u32::try_from(k)
                .ok()
                .and_then(|k| (n as u64).checked_pow(k))
                .filter(|&c| c <= limits.enumeration)
                .map(|c| c as usize)
                .ok_or_else(|| Error::budget(what.to_string(), format!("{n}^{k}"), limits.enumeration))
        };
        let objects = count(pf.objects.len(), "object tuples")?;
        let params = count(pf.params.len(), "parameter tuples")?;
        if (objects as u64).saturating_mul(params as u64) > limits.enumeration {
            return Err(Error::budget("trace matrix cells", objects * params, limits.enumeration));
        }
        let phi = Compiled::with_free(&pf.formula, m.signature(), &pf.slots())?;
        let words = objects.div_ceil(64);
        let mut rows = Vec::with_capacity(params);
        let mut env = vec![0; phi.slots()];
        for p in 0..params {
            let y = tuple_at(n, pf.params.len(), p);
            let mut row = vec![0u64; words];
            for o in 0..objects {
                let x = tuple_at(n, pf.objects.len(), o);
                env[..x.len()].copy_from_slice(&x);
                env[x.len()..x.len() + y.len()].copy_from_slice(&y);
                if phi.eval_in(m, &mut env) {
                    row[o / 64] |= 1 << (o % 64);
                }
            }
            rows.push(row);
        }
        Ok(TraceMatrix { objects, object_arity: pf.objects.len(), param_arity: pf.params.len(), size: n, rows })
    }

    pub fn object_count(&self) -> usize {
        self.objects
    }

    pub fn object(&self, o: usize) -> Vec<usize> {
        tuple_at(self.size, self.object_arity, o)
    }

    pub fn param(&self, p: usize) -> Vec<usize> {
        tuple_at(self.size, self.param_arity, p)
    }

    fn bit(&self, p: usize, o: usize) -> bool {
        self.rows[p][o / 64] >> (o % 64) & 1 == 1
    }

    /// First parameter index realizing each subset of `set`, when all do.
    pub fn shatter(&self, set: &[usize]) -> Option<Vec<usize>> {
        shatter_rows(set, self.rows.len(), |p, o| self.bit(p, o))
    }
}

/// `found[J]` is the first row whose trace on `set` is `J`.
pub(crate) fn shatter_rows(set: &[usize], rows: usize, bit: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    let total = 1usize << set.len();
    if rows < total {
        return None;
    }
    let mut found = vec![usize::MAX; total];
    let mut missing = total;
    for p in 0..rows {
        let mut j = 0;
        for (i, &o) in set.iter().enumerate() {
            if bit(p, o) {
                j |= 1 << i;
            }
        }
        if found[j] == usize::MAX {
            found[j] = p;
            missing -= 1;
            if missing == 0 {
                return Some(found);
            }
        }
    }
    None
}

/// Whether `φ` shatters `set` (object tuples of `M`), with the witnessing parameters.
pub fn shatters(m: &Structure, pf: &PartitionedFormula, set: &[Vec<usize>], limits: &Limits) -> Result<Option<ShatterWitness>> {
    if set.len() > SHATTER_SOFT_CAP {
        return Err(Error::budget("shattered set size", set.len(), SHATTER_SOFT_CAP));
    }
    for x in set {
        if x.len() != pf.objects.len() || x.iter().any(|&e| e >= m.size()) {
            return Err(Error::Invalid(format!("{x:?} is not an object tuple of the structure")));
        }
    }
    let matrix = TraceMatrix::new(m, pf, limits)?;
    let idx: Vec<usize> = set.iter().map(|x| crate::sigstruct::tuple_index(m.size(), x)).collect();
    let mut dedup = idx.clone();
    dedup.sort_unstable();
    dedup.dedup();
    if dedup.len() != idx.len() {
        return Ok(None);
    }
    Ok(matrix
        .shatter(&idx)
        .map(|found| ShatterWitness { set: set.to_vec(), params: found.into_iter().map(|p| matrix.param(p)).collect() }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum VcDimension {
    Exact { value: usize, witness: Vec<Vec<usize>> },
    AtLeast { value: usize, witness: Vec<Vec<usize>> },
}

impl VcDimension {
    pub fn value(&self) -> usize {
        match self {
            VcDimension::Exact { value, .. } | VcDimension::AtLeast { value, .. } => *value,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, VcDimension::Exact { .. })
    }
}

/// Largest shattered set of object tuples, searched by ascending size.
///
/// Only sets all of whose subsets of one size smaller are shattered are
/// tried, since shattering passes to subsets. The first set found at each
/// size, in lexicographic order of tuple indices, is the witness.
pub fn vc_dimension(m: &Structure, pf: &PartitionedFormula, cap: usize, limits: &Limits) -> Result<VcDimension> {
    if cap > SHATTER_SOFT_CAP {
        return Err(Error::budget("VC search cap", cap, SHATTER_SOFT_CAP));
    }
    let matrix = TraceMatrix::new(m, pf, limits)?;
    let (value, best, exact) = levelwise(matrix.object_count(), matrix.rows.len(), cap, limits, |set| matrix.shatter(set).is_some())?;
    let witness = best.iter().map(|&o| matrix.object(o)).collect();
    Ok(if exact { VcDimension::Exact { value, witness } } else { VcDimension::AtLeast { value, witness } })
}

/// Level-wise search shared with parametric families. Returns the largest
/// size reached, its first witness and whether the value is exact.
pub(crate) fn levelwise(
    objects: usize,
    rows: usize,
    cap: usize,
    limits: &Limits,
    shattered: impl Fn(&[usize]) -> bool,
) -> Result<(usize, Vec<usize>, bool)> {
    if rows == 0 {
        return Ok((0, Vec::new(), true));
    }
    let mut level: Vec<Vec<usize>> = vec![Vec::new()];
    let mut best = Vec::new();
    let mut work: u64 = 0;
    for k in 1..=cap {
        if k > objects || rows < 1 << k {
            return Ok((k - 1, best, true));
        }
        let known: std::collections::HashSet<&Vec<usize>> = level.iter().collect();
        let mut next = Vec::new();
        for base in &level {
            let start = base.last().map_or(0, |&l| l + 1);
            for o in start..objects {
                let mut cand = base.clone();
                cand.push(o);
                work += 1;
                if work > limits.search_nodes {
                    return Err(Error::budget("shattering search", work, limits.search_nodes));
                }
                let subsets_ok = (0..cand.len() - 1).all(|drop| {
                    let mut sub = cand.clone();
                    sub.remove(drop);
                    known.contains(&sub)
                });
                if subsets_ok && shattered(&cand) {
                    next.push(cand);
                }
            }
        }
        if next.is_empty() {
            return Ok((k - 1, best, true));
        }
        best = next[0].clone();
        level = next;
    }
    Ok((cap, best, cap >= objects || rows < 1 << (cap + 1)))
}

/// `G_n`: points `p1..pn`, one vertex per subset of the points, and
/// `R(p, S)` when `p ∈ S`. Subset vertices are named `s` followed by the
/// indices of their points.
pub fn incidence_graph(n: usize) -> Result<Structure> {
    let sig = Arc::new(Signature::new("bipartite").with_relation("R", 2)?);
    let mut names: Vec<String> = (1..=n).map(|i| format!("p{i}")).collect();
    for s in 0..1usize << n {
        names.push(format!("s{}", (0..n).filter(|i| s >> i & 1 == 1).map(|i| (i + 1).to_string()).collect::<String>()));
    }
    let mut m = Structure::new(sig, names)?;
    for s in 0..1usize << n {
        for i in 0..n {
            if s >> i & 1 == 1 {
                m.set(0, &[i, n + s], true);
            }
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_partitioned;

    fn rxy(sig: &Signature) -> PartitionedFormula {
        parse_partitioned("R(x;y)", Some(sig)).unwrap().0
    }

    #[test]
    fn g2_shatters_its_points() {
        let g = incidence_graph(2).unwrap();
        let pf = rxy(g.signature());
        let w = shatters(&g, &pf, &[vec![0], vec![1]], &Limits::default()).unwrap().unwrap();
        assert!(w.verify(&g, &pf).unwrap());
        // nonempty J is first realized by the vertex for J; the empty trace by p1
        assert_eq!(w.params, vec![vec![0], vec![3], vec![4], vec![5]]);
    }

    #[test]
    fn empty_set_is_shattered_by_any_parameter() {
        let g = incidence_graph(1).unwrap();
        let w = shatters(&g, &rxy(g.signature()), &[], &Limits::default()).unwrap().unwrap();
        assert_eq!(w.params, vec![vec![0]]);
    }

    #[test]
    fn incidence_graphs_have_full_dimension() {
        for n in 1..=3 {
            let g = incidence_graph(n).unwrap();
            let d = vc_dimension(&g, &rxy(g.signature()), 5, &Limits::default()).unwrap();
            assert_eq!(d.value(), n);
            assert!(d.is_exact());
        }
    }

    #[test]
    fn repeated_tuples_are_not_shattered() {
        let g = incidence_graph(2).unwrap();
        assert!(shatters(&g, &rxy(g.signature()), &[vec![0], vec![0]], &Limits::default()).unwrap().is_none());
    }

    #[test]
    fn cap_gives_a_lower_bound() {
        let g = incidence_graph(3).unwrap();
        let d = vc_dimension(&g, &rxy(g.signature()), 2, &Limits::default()).unwrap();
        assert_eq!(d, VcDimension::AtLeast { value: 2, witness: vec![vec![0], vec![1]] });
    }
}
