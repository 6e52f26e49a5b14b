//! Run configuration, the example corpus, `G_n` and the free particle.

mod corpus;
mod particle;

use num_rational::BigRational;
use serde::Serialize;

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::sigstruct::Structure;
use crate::vc::parse_rational;

pub use corpus::{corpus, Basis, CheckOutcome, CorpusEntry, Expectation};
pub use particle::{free_particle_refute, Observation, ParticleReport};

/// Largest `n` accepted by [`make_gn`].
pub const GN_MAX: usize = 5;

/// `G_n`: the points `[n]` and the subsets of `[n]`, with `R(i, X)` iff `i ∈ X`.
pub fn make_gn(n: usize) -> Result<Structure> {
    if n > GN_MAX {
        return Err(Error::budget(format!("G_{n}"), format!("{} vertices", n + (1usize << n.min(60))), format!("n = {GN_MAX}")));
    }
    crate::vc::incidence_graph(n)
}

/// Rows of rationals from CSV text with a header line.
pub fn read_rational_table(text: &str) -> Result<Vec<Vec<BigRational>>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Invalid(format!("CSV row {}: {e}", i + 1)))?;
        rows.push(record.iter().map(parse_rational).collect::<Result<Vec<_>>>()?);
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

/// Budgets, the master seed and the output format of one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub limits: Limits,
    pub seed: u64,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { limits: Limits::default(), seed: 0, format: Format::Text }
    }
}

impl RunConfig {
    /// Rejects zero caps.
    pub fn validate(&self) -> Result<()> {
        let l = &self.limits;
        let caps = [
            ("enumeration", l.enumeration),
            ("canon_size", l.canon_size as u64),
            ("diagrams", l.diagrams),
            ("search_nodes", l.search_nodes),
            ("chain_size", l.chain_size as u64),
            ("markov_states", l.markov_states),
        ];
        match caps.iter().find(|(_, v)| *v == 0) {
            Some((name, _)) => Err(Error::Invalid(format!("the `{name}` cap must be positive"))),
            None => Ok(()),
        }
    }

    /// A seed for the named subsystem, derived from the master seed.
    pub fn sub_seed(&self, subsystem: &str) -> u64 {
        // FNV-1a over the name, mixed with the seed
        let h = subsystem.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
        self.seed ^ h
    }
}
