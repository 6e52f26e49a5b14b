//! Refuting the free-particle hypothesis from position observations.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::falsify::Verdict;

/// A position in space observed at a time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observation {
    pub time: BigRational,
    pub position: [BigRational; 3],
}

impl Observation {
    pub fn new(time: BigRational, position: [BigRational; 3]) -> Observation {
        Observation { time, position }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParticleReport {
    pub verdict: Verdict,
    pub observations: usize,
    /// Positions (in time order) of the two observations fixing the line.
    pub line: Option<(usize, usize)>,
    /// Position (in time order) of the first observation off the line.
    pub refuted_at: Option<usize>,
}

fn diff(a: &[BigRational; 3], b: &[BigRational; 3]) -> [BigRational; 3] {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

fn cross_is_zero(u: &[BigRational; 3], v: &[BigRational; 3]) -> bool {
    (&u[1] * &v[2] - &u[2] * &v[1]).is_zero() && (&u[2] * &v[0] - &u[0] * &v[2]).is_zero() && (&u[0] * &v[1] - &u[1] * &v[0]).is_zero()
}

/// A free particle moves on a straight line, so once two distinct positions
/// fix the line every later observation must lie on it. Observations are
/// taken in time order; collinearity is tested exactly by cross products.
pub fn free_particle_refute(observations: &[Observation]) -> Result<ParticleReport> {
    if observations.is_empty() {
        return Err(Error::Invalid("at least one observation is needed".into()));
    }
    let mut order: Vec<&Observation> = observations.iter().collect();
    order.sort_by(|a, b| a.time.cmp(&b.time));
    if let Some(w) = order.windows(2).find(|w| w[0].time == w[1].time) {
        return Err(Error::DuplicateTime(w[0].time.to_string()));
    }
    let mut report = ParticleReport { verdict: Verdict::ConsistentSoFar, observations: order.len(), line: None, refuted_at: None };
    let origin = &order[0].position;
    let Some(second) = order.iter().position(|o| o.position != *origin) else {
        return Ok(report);
    };
    report.line = Some((0, second));
    let direction = diff(&order[second].position, origin);
    if let Some(i) = (second + 1..order.len()).find(|&i| !cross_is_zero(&direction, &diff(&order[i].position, origin))) {
        report.verdict = Verdict::Refuted;
        report.refuted_at = Some(i);
    }
    Ok(report)
}
