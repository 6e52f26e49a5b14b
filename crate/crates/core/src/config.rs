//! Search budgets shared by every enumeration-heavy operation.

use serde::Serialize;

/// Caps that keep exhaustive searches at desk scale.
///
/// Every operation that enumerates structures, permutations, diagrams or
/// amalgams checks the relevant cap before starting and fails with
/// [`Error::BudgetExceeded`](crate::Error::BudgetExceeded) instead of running
/// away.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Limits {
    /// Maximum number of labeled structures a single enumeration may visit.
    pub enumeration: u64,
    /// Largest domain accepted by canonical labeling.
    pub canon_size: usize,
    /// Largest number of variables for forbidden-configuration search.
    pub forbid_vars: usize,
    /// Maximum number of partial diagrams examined by forbidden-configuration search.
    pub diagrams: u64,
    /// Node budget for amalgam and embedding searches.
    pub search_nodes: u64,
    /// Largest structure the generic chain may grow to.
    pub chain_size: usize,
    /// Largest number of states (or DP cells) an exact Markov computation may use.
    pub markov_states: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enumeration: 1 << 26,
            canon_size: 10,
            forbid_vars: 4,
            diagrams: 1 << 26,
            search_nodes: 50_000_000,
            chain_size: 96,
            markov_states: 1 << 20,
        }
    }
}

impl Limits {
    /// Sets the enumeration and diagram budgets together, as driven by `--budget`.
    pub fn with_enumeration(mut self, enumeration: u64) -> Self {
        self.enumeration = enumeration;
        self.diagrams = enumeration;
        self
    }
}
