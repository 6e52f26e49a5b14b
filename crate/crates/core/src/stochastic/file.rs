//! Chain specifications in JSON, and the coin-flip chain.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Deserialize;

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::sigstruct::text::{parse_signature, parse_structure};
use crate::sigstruct::Signature;
use crate::vc::parse_rational;

use super::matrix::{Dist, StateSpace, StochMatrix};

/// ```json
/// {"sigma": {"signature": "sig coin { rel H/1 }", "n": 1},
///  "mu": ["1/2", "1/2"],
///  "rho": [["1/2", "1/2"], ["1/2", "1/2"]]}
/// ```
/// `sigma` may list `states` (structure texts) instead of `n`, and `rho` may
/// be given flat in row-major order.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainFile {
    sigma: SigmaFile,
    mu: Vec<String>,
    rho: RhoFile,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SigmaFile {
    signature: String,
    n: Option<usize>,
    states: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RhoFile {
    Rows(Vec<Vec<String>>),
    Flat(Vec<String>),
}

/// A state space with an initial distribution and a transition matrix.
#[derive(Clone, Debug)]
pub struct MarkovSpec {
    pub space: StateSpace,
    pub mu: Dist,
    pub rho: StochMatrix,
}

fn rationals(v: &[String]) -> Result<Vec<BigRational>> {
    v.iter().map(|s| parse_rational(s)).collect()
}

impl MarkovSpec {
    pub fn new(space: StateSpace, mu: Dist, rho: StochMatrix) -> Result<MarkovSpec> {
        if mu.len() != space.len() || rho.len() != space.len() {
            return Err(Error::Invalid(format!(
                "the state space has {} states but mu has {} entries and rho {} rows",
                space.len(),
                mu.len(),
                rho.len()
            )));
        }
        Ok(MarkovSpec { space, mu, rho })
    }

    pub fn from_json(text: &str, limits: &Limits) -> Result<MarkovSpec> {
        let file: ChainFile = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("chain file: {e}")))?;
        let sig = Arc::new(parse_signature(&file.sigma.signature)?);
        let space = match (file.sigma.n, file.sigma.states) {
            (Some(n), None) => StateSpace::all(sig, n, limits)?,
            (None, Some(states)) => {
                let parsed = states.iter().map(|s| parse_structure(s, &[sig.clone()]).map(|(_, m)| m)).collect::<Result<Vec<_>>>()?;
                StateSpace::from_states(sig, parsed)?
            }
            _ => return Err(Error::Invalid("`sigma` needs exactly one of `n` and `states`".into())),
        };
        let mu = Dist::new(rationals(&file.mu)?)?;
        let k = space.len();
        let rows = match file.rho {
            RhoFile::Rows(rows) => rows.iter().map(|r| rationals(r)).collect::<Result<Vec<_>>>()?,
            RhoFile::Flat(flat) => {
                if flat.len() != k * k {
                    return Err(Error::InvalidMatrix(format!("{} entries for {k} states", flat.len())));
                }
                rationals(&flat)?.chunks(k).map(<[_]>::to_vec).collect()
            }
        };
        MarkovSpec::new(space, mu, StochMatrix::new(rows)?)
    }
}

/// The coin-flip chain over `{H/1}` on one object: state 0 is tails (empty
/// `H`), state 1 is heads. With `p_T = 1 − p_H`, `μ = (p_T, p_H)` and
/// `ρ(H,H) = ρ(T,T) = p_H`, `ρ(H,T) = ρ(T,H) = p_T`, as the matrix is written
/// for the coin example. The flips are independent only when `p_H = 1/2`.
pub fn coin_chain(p_heads: &BigRational, limits: &Limits) -> Result<(StateSpace, Dist, StochMatrix)> {
    if p_heads.is_negative() || *p_heads > BigRational::one() {
        return Err(Error::InvalidDistribution(format!("p_H = {p_heads} is not a probability")));
    }
    let sig = Arc::new(Signature::new("coin").with_relation("H", 1)?);
    let space = StateSpace::all(sig, 1, limits)?;
    let p_t = BigRational::one() - p_heads;
    let mu = Dist::new(vec![p_t.clone(), p_heads.clone()])?;
    let rho = StochMatrix::new(vec![vec![p_heads.clone(), p_t.clone()], vec![p_t, p_heads.clone()]])?;
    Ok((space, mu, rho))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coin_states_are_tails_then_heads() {
        let (space, mu, rho) = coin_chain(&BigRational::new(1.into(), 3.into()), &Limits::default()).unwrap();
        assert_eq!(space.len(), 2);
        assert!(!space.state(0).holds(0, &[0]));
        assert!(space.state(1).holds(0, &[0]));
        assert_eq!(mu.entries(), [BigRational::new(2.into(), 3.into()), BigRational::new(1.into(), 3.into())]);
        assert_eq!(*rho.get(1, 1), BigRational::new(1.into(), 3.into()));
        assert_eq!(*rho.get(0, 0), BigRational::new(1.into(), 3.into()));
        assert!(coin_chain(&BigRational::new(3.into(), 2.into()), &Limits::default()).is_err());
    }

    #[test]
    fn chain_files_in_both_shapes() {
        let nested = r#"{"sigma": {"signature": "sig coin { rel H/1 }", "n": 1},
            "mu": ["1/2", "0.5"], "rho": [["1/2", "1/2"], ["1/4", "3/4"]]}"#;
        let spec = MarkovSpec::from_json(nested, &Limits::default()).unwrap();
        assert_eq!(spec.space.len(), 2);
        assert_eq!(*spec.rho.get(1, 0), BigRational::new(1.into(), 4.into()));
        let flat = r#"{"sigma": {"signature": "sig coin { rel H/1 }",
            "states": ["structure h over coin { dom = {c}; H = {c} }", "structure t over coin { dom = {c} }"]},
            "mu": ["1", "0"], "rho": ["0", "1", "1", "0"]}"#;
        let spec = MarkovSpec::from_json(flat, &Limits::default()).unwrap();
        assert!(spec.space.state(0).holds(0, &[0]));
        assert_eq!(spec.mu, Dist::point(2, 0));
        let bad = r#"{"sigma": {"signature": "sig coin { rel H/1 }", "n": 1}, "mu": ["1/2", "1/2"], "rho": ["1"]}"#;
        assert!(MarkovSpec::from_json(bad, &Limits::default()).is_err());
        let dup = r#"{"sigma": {"signature": "sig coin { rel H/1 }",
            "states": ["structure a over coin { dom = {c} }", "structure b over coin { dom = {d} }"]},
            "mu": ["1/2", "1/2"], "rho": ["1/2", "1/2", "1/2", "1/2"]}"#;
        assert!(MarkovSpec::from_json(dup, &Limits::default()).is_err());
    }
}
