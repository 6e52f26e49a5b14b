//! Seeded trajectories of a chain and their time-indexed rendering.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fraisse::{time_indexed_signature, BEFORE, OBJECT, SUCC, TIME};
use crate::sigstruct::{tuples, Structure};

use super::matrix::{Dist, StateSpace, StochMatrix};

/// Name of the generator recorded in every trajectory.
pub const GENERATOR: &str = "ChaCha8";

/// `⌈x · 2⁶⁴⌉` for `0 ≤ x ≤ 1`.
fn ceil_scaled(x: &BigRational) -> u128 {
    let scaled = x * BigRational::from_integer(BigInt::from(1u128 << 64));
    scaled.ceil().to_integer().to_u128().expect("probability within [0, 1]")
}

/// Exact inverse-CDF sampling: a uniform `u ∈ {0, …, 2⁶⁴−1}` picks the first
/// index whose cumulative mass exceeds `u / 2⁶⁴`. Zero-probability indices
/// are never chosen.
#[derive(Clone, Debug)]
pub(crate) struct Sampler {
    start: Vec<u128>,
    rows: Vec<Vec<u128>>,
}

fn thresholds(p: &[BigRational]) -> Vec<u128> {
    let mut acc = BigRational::zero();
    p.iter()
        .map(|x| {
            acc += x;
            ceil_scaled(&acc)
        })
        .collect()
}

fn pick(th: &[u128], u: u64) -> usize {
    th.partition_point(|&t| t <= u as u128)
}

impl Sampler {
    pub(crate) fn new(mu: &Dist, rho: &StochMatrix) -> Sampler {
        Sampler { start: thresholds(mu.entries()), rows: (0..rho.len()).map(|i| thresholds(rho.row(i))).collect() }
    }

    pub(crate) fn run(&self, horizon: usize, rng: &mut impl RngCore, mut visit: impl FnMut(usize) -> bool) {
        let mut s = pick(&self.start, rng.next_u64());
        for t in 0..horizon {
            if t > 0 {
                s = pick(&self.rows[s], rng.next_u64());
            }
            if visit(s) {
                return;
            }
        }
    }
}

/// A seeded run of a chain: `states[t]` is the index of the state at time `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trajectory {
    pub generator: String,
    pub seed: u64,
    pub horizon: usize,
    pub states: Vec<usize>,
}

/// `horizon` states, the first drawn from `mu` and each next one from the row
/// of `rho` at the current state.
pub fn simulate(mu: &Dist, rho: &StochMatrix, horizon: usize, seed: u64) -> Result<Trajectory> {
    if horizon == 0 {
        return Err(Error::Invalid("the horizon must be at least 1".into()));
    }
    if mu.len() != rho.len() {
        return Err(Error::InvalidDistribution(format!("{} entries for {} states", mu.len(), rho.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = Vec::with_capacity(horizon);
    Sampler::new(mu, rho).run(horizon, &mut rng, |s| {
        states.push(s);
        false
    });
    Ok(Trajectory { generator: GENERATOR.into(), seed, horizon, states })
}

impl Trajectory {
    /// The run as one structure over the discrete time-indexed signature:
    /// objects `o0…`, times `t0…`, `R(x̄, t)` iff `R(x̄)` holds in the state
    /// at time `t`, `lt` the order of the times and `succ` its successor.
    pub fn to_structure(&self, space: &StateSpace) -> Result<Structure> {
        let base = space.signature();
        let sig = Arc::new(time_indexed_signature(base, true)?);
        let n = space.objects();
        let names: Vec<String> = (0..n).map(|i| format!("o{i}")).chain((0..self.horizon).map(|t| format!("t{t}"))).collect();
        let mut m = Structure::new(sig.clone(), names)?;
        let rel = |name: &str| sig.relation_index(name).expect("time-indexed symbol");
        let (o, tau, lt, succ) = (rel(OBJECT), rel(TIME), rel(BEFORE), rel(SUCC));
        for x in 0..n {
            m.set(o, &[x], true);
        }
        for (t, &s) in self.states.iter().enumerate() {
            let time = n + t;
            m.set(tau, &[time], true);
            for u in 0..t {
                m.set(lt, &[n + u, time], true);
            }
            if t > 0 {
                m.set(succ, &[time - 1, time], true);
            }
            let state = space.state(s);
            for (r, sym) in base.relations().iter().enumerate() {
                for tuple in tuples(n, sym.arity) {
                    if state.holds(r, &tuple) {
                        let mut args = tuple.clone();
                        args.push(time);
                        m.set(r, &args, true);
                    }
                }
            }
        }
        Ok(m)
    }
}
