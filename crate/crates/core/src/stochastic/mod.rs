//! Markov-generated time-indexed structures on finite state spaces: exact
//! distributions and stochastic matrices over `Str_L([n])`, the product
//! chain, stationary distributions, seeded trajectories and the probability
//! that a configuration is realized within a horizon.

mod file;
mod matrix;
mod realize;
mod sim;

pub use file::{coin_chain, MarkovSpec};
pub use matrix::{is_positive_chain, product_chain, stationary, Dist, StateSpace, StochMatrix};
pub use realize::{realization_probability, Condition, Mode, Realization, RealizationConfig, Step, TimeTerm};
pub use sim::{simulate, Trajectory, GENERATOR};
