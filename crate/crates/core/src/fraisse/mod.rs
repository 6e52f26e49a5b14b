//! Fraïssé classes at bounded size: ages, the hereditary, joint embedding
//! and amalgamation properties, and finite generic chains.

mod chain;
mod checks;
pub(crate) mod search;
mod tau;

pub use chain::{generic_chain, ChainState, Stage};
pub use checks::{age, age_up_to, check_ap, check_fraisse, check_hp, check_jep, Amalgam, AmalgamProblem, FraisseReport, HpFailure, JepFailure, PropertyCheck};
pub use tau::{time_indexed_signature, time_indexed_theory, BEFORE, OBJECT, SUCC, TIME};
