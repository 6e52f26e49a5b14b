//! Families of planar sets cut out by rational parameters.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::config::Limits;
use crate::error::{Error, Result};

use super::shatter::{levelwise, shatter_rows};

type Predicate = dyn Fn(&[BigRational], &[BigRational]) -> bool + Send + Sync;

/// A predicate `φ(x̄; ā)` on rational tuples, evaluated exactly.
#[derive(Clone)]
pub struct ParametricFamily {
    pub name: String,
    pub objects: usize,
    pub params: usize,
    pred: Arc<Predicate>,
}

impl fmt::Debug for ParametricFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParametricFamily({}, {} objects, {} parameters)", self.name, self.objects, self.params)
    }
}

impl ParametricFamily {
    pub fn new(
        name: &str,
        objects: usize,
        params: usize,
        pred: impl Fn(&[BigRational], &[BigRational]) -> bool + Send + Sync + 'static,
    ) -> ParametricFamily {
        ParametricFamily { name: name.to_string(), objects, params, pred: Arc::new(pred) }
    }

    /// `L(x,y; a,b,c)`: `a·y + b·x + c = 0`.
    pub fn line() -> ParametricFamily {
        ParametricFamily::new("line", 2, 3, |p, q| {
            let (x, y) = (&p[0], &p[1]);
            let (a, b, c) = (&q[0], &q[1], &q[2]);
            (a * y + b * x + c).is_zero()
        })
    }

    /// Fat lines: `|a·x + b·y + c|² < r·(a² + b²)`, with the strict inequality.
    pub fn fat_line() -> ParametricFamily {
        ParametricFamily::new("fatline", 2, 4, |p, q| {
            let (x, y) = (&p[0], &p[1]);
            let (a, b, c, r) = (&q[0], &q[1], &q[2], &q[3]);
            let d = a * x + b * y + c;
            &d * &d < r * (a * a + b * b)
        })
    }

    pub fn by_name(name: &str) -> Result<ParametricFamily> {
        match name {
            "line" => Ok(ParametricFamily::line()),
            "fatline" | "fat-line" => Ok(ParametricFamily::fat_line()),
            other => Err(Error::Invalid(format!("unknown family `{other}` (known: line, fatline)"))),
        }
    }

    pub fn holds(&self, point: &[BigRational], param: &[BigRational]) -> Result<bool> {
        if point.len() != self.objects || param.len() != self.params {
            return Err(Error::Arity { symbol: self.name.clone(), expected: self.objects + self.params, got: point.len() + param.len() });
        }
        Ok((self.pred)(point, param))
    }
}

/// Parses `3`, `-2/5` or `0.25` exactly.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::Invalid(format!("`{t}` is not a rational number"));
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let digits = format!("{}{frac}", whole.trim_start_matches(['-', '+']));
        let num = BigInt::from_str(&digits).map_err(|_| bad())?;
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        let r = BigRational::new(num, den);
        return Ok(if negative { -r } else { r });
    }
    let r = BigRational::from_str(t).map_err(|_| bad())?;
    Ok(r)
}

/// A shattered subset of the points, with the first grid parameter realizing each trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParametricBound {
    pub lower_bound: usize,
    /// Indices into the point list.
    pub shattered: Vec<usize>,
    /// Indices into the grid, one per subset of `shattered` in bitmask order.
    pub params: Vec<usize>,
}

/// Size of the largest subset of `points` shattered by the family using only
/// parameters from `grid`: a certified lower bound on its VC dimension.
pub fn parametric_vc_lower_bound(
    family: &ParametricFamily,
    points: &[Vec<BigRational>],
    grid: &[Vec<BigRational>],
    limits: &Limits,
) -> Result<ParametricBound> {
    let mut rows = Vec::with_capacity(grid.len());
    for q in grid {
        let mut row = Vec::with_capacity(points.len());
        for p in points {
            row.push(family.holds(p, q)?);
        }
        rows.push(row);
    }
    let cap = points.len().min(super::SHATTER_SOFT_CAP);
    let bit = |p: usize, o: usize| rows[p][o];
    let (lower_bound, shattered, _) = levelwise(points.len(), rows.len(), cap, limits, |set| shatter_rows(set, rows.len(), bit).is_some())?;
    let params = if grid.is_empty() { Vec::new() } else { shatter_rows(&shattered, rows.len(), bit).unwrap_or_default() };
    Ok(ParametricBound { lower_bound, shattered, params })
}

/// `true` when the three points lie on one line.
pub fn collinear(p: &[BigRational], q: &[BigRational], r: &[BigRational]) -> bool {
    let cross = (&q[0] - &p[0]) * (&r[1] - &p[1]) - (&q[1] - &p[1]) * (&r[0] - &p[0]);
    cross.abs().is_zero()
}
