//! Finite model theory toolkit for falsifiability questions: first-order
//! evaluation over finite structures, forbidden configurations, FIT checks,
//! VC dimension, Fraïssé classes and Markov-generated time-indexed structures.

pub mod config;
pub mod error;
pub mod falsify;
pub mod fitness;
pub mod fraisse;
mod lexer;
pub mod logic;
pub mod shell;
pub mod sigstruct;
pub mod stochastic;
pub mod vc;

pub use config::Limits;
pub use error::{Error, Pos, Result};
pub use logic::{Formula, PartitionedFormula, Term, Theory};
pub use sigstruct::{IsoClassId, Morphism, Signature, Structure};
