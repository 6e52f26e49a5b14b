//! State spaces, distributions and stochastic matrices with exact rational entries.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::sigstruct::{canonical_form, enumerate_structures, Signature, Structure};

/// `Str_L([n])`: every `L`-structure on `n` objects, in enumeration order,
/// or an explicit list of states.
#[derive(Clone, Debug)]
pub struct StateSpace {
    sig: Arc<Signature>,
    objects: usize,
    states: Vec<Structure>,
}

impl StateSpace {
    /// All structures on `n` objects, indexed as [`enumerate_structures`] yields them.
    pub fn all(sig: Arc<Signature>, n: usize, limits: &Limits) -> Result<StateSpace> {
        if !sig.is_relational() {
            return Err(Error::Unsupported("state spaces need a relational signature".into()));
        }
        let cap = Limits { enumeration: limits.enumeration.min(limits.markov_states), ..limits.clone() };
        let states = enumerate_structures(&sig, n, &cap)?.collect();
        Ok(StateSpace { sig, objects: n, states })
    }

    /// An explicit list of distinct states on a common domain.
    pub fn from_states(sig: Arc<Signature>, states: Vec<Structure>) -> Result<StateSpace> {
        let n = states.first().map(Structure::size).ok_or_else(|| Error::Invalid("a state space needs at least one state".into()))?;
        for (i, s) in states.iter().enumerate() {
            sig.ensure_same(s.signature())?;
            if s.size() != n {
                return Err(Error::Invalid(format!("state {i} has {} objects, expected {n}", s.size())));
            }
            if states[..i].iter().any(|t| same_tables(t, s)) {
                return Err(Error::Invalid(format!("state {i} is listed twice")));
            }
        }
        Ok(StateSpace { sig, objects: n, states })
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn objects(&self) -> usize {
        self.objects
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &Structure {
        &self.states[i]
    }

    pub fn states(&self) -> &[Structure] {
        &self.states
    }

    /// Index of the state with the same interpretations as `m`.
    pub fn index_of(&self, m: &Structure) -> Option<usize> {
        self.states.iter().position(|s| same_tables(s, m))
    }

    /// Indices of the states isomorphic to `m`.
    pub fn isomorphic_to(&self, m: &Structure, limits: &Limits) -> Result<Vec<usize>> {
        let id = canonical_form(m, limits)?.id;
        let mut out = Vec::new();
        for (i, s) in self.states.iter().enumerate() {
            if canonical_form(s, limits)?.id == id {
                out.push(i);
            }
        }
        Ok(out)
    }
}

/// Same interpretations on the same domain size, ignoring element names.
pub(crate) fn same_tables(a: &Structure, b: &Structure) -> bool {
    a.size() == b.size() && (0..a.signature().relations().len()).all(|r| a.relation_table(r) == b.relation_table(r))
}

fn rationals<S: Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

fn rational_rows<S: Serializer>(rows: &[Vec<BigRational>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(rows.iter().map(|row| row.iter().map(|r| r.to_string()).collect::<Vec<_>>()))
}

/// A probability distribution on a finite index set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Dist(#[serde(serialize_with = "rationals")] Vec<BigRational>);

impl Dist {
    /// Fails unless every entry is nonnegative and the entries sum to exactly 1.
    pub fn new(p: Vec<BigRational>) -> Result<Dist> {
        if p.is_empty() {
            return Err(Error::InvalidDistribution("no entries".into()));
        }
        if let Some(i) = p.iter().position(|x| x.is_negative()) {
            return Err(Error::InvalidDistribution(format!("entry {i} is negative")));
        }
        let total: BigRational = p.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
        }
        Ok(Dist(p))
    }

    pub fn uniform(k: usize) -> Result<Dist> {
        if k == 0 {
            return Err(Error::InvalidDistribution("no entries".into()));
        }
        Ok(Dist(vec![BigRational::new(1.into(), k.into()); k]))
    }

    /// All mass on `i`.
    pub fn point(k: usize, i: usize) -> Dist {
        let mut p = vec![BigRational::zero(); k];
        p[i] = BigRational::one();
        Dist(p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.0
    }

    pub fn get(&self, i: usize) -> &BigRational {
        &self.0[i]
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|x| x.is_positive())
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A row-stochastic matrix: `rows[i][j]` is the probability of moving from `i` to `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct StochMatrix {
    #[serde(serialize_with = "rational_rows")]
    rows: Vec<Vec<BigRational>>,
}

impl StochMatrix {
    pub fn new(rows: Vec<Vec<BigRational>>) -> Result<StochMatrix> {
        let k = rows.len();
        if k == 0 {
            return Err(Error::InvalidMatrix("no rows".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidMatrix(format!("row {i} has {} entries, expected {k}", row.len())));
            }
            if row.iter().any(|x| x.is_negative()) {
                return Err(Error::InvalidMatrix(format!("row {i} has a negative entry")));
            }
            let total: BigRational = row.iter().sum();
            if !total.is_one() {
                return Err(Error::InvalidMatrix(format!("row {i} sums to {total}")));
            }
        }
        Ok(StochMatrix { rows })
    }

    /// Every row equal to the uniform distribution.
    pub fn uniform(k: usize) -> Result<StochMatrix> {
        StochMatrix::new(vec![Dist::uniform(k)?.0; k])
    }

    pub fn identity(k: usize) -> StochMatrix {
        StochMatrix { rows: (0..k).map(|i| Dist::point(k, i).0).collect() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.rows[i][j]
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.rows[i]
    }

    pub fn is_positive(&self) -> bool {
        self.rows.iter().flatten().all(|x| x.is_positive())
    }

    /// `p · ρ`: the distribution one step later.
    pub fn step(&self, p: &Dist) -> Dist {
        let k = self.len();
        let mut out = vec![BigRational::zero(); k];
        for (i, pi) in p.0.iter().enumerate() {
            if pi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += pi * &self.rows[i][j];
            }
        }
        Dist(out)
    }

    /// `self · other`.
    pub fn then(&self, other: &StochMatrix) -> StochMatrix {
        StochMatrix { rows: self.rows.iter().map(|r| other.step(&Dist(r.clone())).0).collect() }
    }

    pub fn power(&self, e: usize) -> StochMatrix {
        let mut out = StochMatrix::identity(self.len());
        for _ in 0..e {
            out = out.then(self);
        }
        out
    }

    /// A pair `(from, to)` such that `to` is unreachable from `from`, if any.
    pub fn unreachable_pair(&self) -> Option<(usize, usize)> {
        let k = self.len();
        for from in 0..k {
            let mut seen = vec![false; k];
            let mut queue = VecDeque::from([from]);
            seen[from] = true;
            while let Some(i) = queue.pop_front() {
                for j in 0..k {
                    if !seen[j] && self.rows[i][j].is_positive() {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
            if let Some(to) = seen.iter().position(|s| !s) {
                return Some((from, to));
            }
        }
        None
    }

    pub fn is_irreducible(&self) -> bool {
        self.unreachable_pair().is_none()
    }
}

/// Membership of `(μ, ρ)` in the class of chains with every initial and
/// transition probability strictly positive.
pub fn is_positive_chain(mu: &Dist, rho: &StochMatrix) -> bool {
    mu.len() == rho.len() && mu.is_positive() && rho.is_positive()
}

/// The unique `η` with `η·ρ = η` and `Σ η = 1`, by exact Gaussian
/// elimination with the first nonzero pivot in each column.
pub fn stationary(rho: &StochMatrix) -> Result<Dist> {
    if let Some((from, to)) = rho.unreachable_pair() {
        return Err(Error::ReducibleChain { from, to });
    }
    let k = rho.len();
    // rows: (ρᵀ − I) η = 0 with the last equation replaced by Σ η = 1
    let mut a: Vec<Vec<BigRational>> = (0..k)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..k).map(|j| rho.get(j, i).clone()).collect();
            row[i] -= BigRational::one();
            row.push(BigRational::zero());
            row
        })
        .collect();
    a[k - 1] = vec![BigRational::one(); k + 1];
    for col in 0..k {
        let pivot = (col..k).find(|&r| !a[r][col].is_zero()).ok_or_else(|| Error::InvalidMatrix("singular stationary system".into()))?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let (pivot_row, row) = if r < col {
                    let (lo, hi) = a.split_at_mut(col);
                    (&hi[0], &mut lo[r])
                } else {
                    let (lo, hi) = a.split_at_mut(r);
                    (&lo[col], &mut hi[0])
                };
                for (x, p) in row.iter_mut().zip(pivot_row) {
                    *x -= &f * p;
                }
            }
        }
    }
    let eta: Vec<BigRational> = a.into_iter().map(|row| row[k].clone()).collect();
    let d = Dist::new(eta)?;
    debug_assert_eq!(rho.step(&d), d);
    Ok(d)
}

/// The chain on `m`-tuples of states: `ρ*((W₁…W_m),(W′₁…W′_m)) = ∏ ρ(Wᵢ,W′ᵢ)`,
/// and `μ*` the joint law of the states at `times` (strictly increasing)
/// when the chain starts from `μ`. Tuples are indexed with the first
/// coordinate most significant.
pub fn product_chain(mu: &Dist, rho: &StochMatrix, times: &[usize], limits: &Limits) -> Result<(Dist, StochMatrix)> {
    let k = rho.len();
    let m = times.len();
    if m == 0 || times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("product chain times must be nonempty and strictly increasing".into()));
    }
    if mu.len() != k {
        return Err(Error::InvalidDistribution(format!("{} entries for {k} states", mu.len())));
    }
    let states = (k as u64).checked_pow(m as u32).filter(|&s| s <= limits.markov_states);
    let Some(states) = states else {
        return Err(Error::budget(format!("product chain on {m}-tuples of {k} states"), format!("{k}^{m}"), limits.markov_states));
    };
    let states = states as usize;
    if (states as u64).saturating_mul(states as u64) > limits.enumeration {
        return Err(Error::budget("product transition matrix entries", states * states, limits.enumeration));
    }
    let digits = |mut idx: usize| {
        let mut d = vec![0; m];
        for slot in d.iter_mut().rev() {
            *slot = idx % k;
            idx /= k;
        }
        d
    };
    let rows: Vec<Vec<BigRational>> = (0..states)
        .map(|i| {
            let a = digits(i);
            (0..states)
                .map(|j| {
                    let b = digits(j);
                    a.iter().zip(&b).map(|(&x, &y)| rho.get(x, y).clone()).product()
                })
                .collect()
        })
        .collect();
    let mut start = mu.clone();
    for _ in 0..times[0] {
        start = rho.step(&start);
    }
    let gaps: Vec<StochMatrix> = times.windows(2).map(|w| rho.power(w[1] - w[0])).collect();
    let joint: Vec<BigRational> = (0..states)
        .map(|i| {
            let d = digits(i);
            let mut p = start.get(d[0]).clone();
            for (g, w) in gaps.iter().zip(d.windows(2)) {
                if p.is_zero() {
                    break;
                }
                p *= g.get(w[0], w[1]);
            }
            p
        })
        .collect();
    Ok((Dist::new(joint)?, StochMatrix::new(rows)?))
}
