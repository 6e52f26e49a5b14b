//! Shattering, VC dimension and the sentences `VC_n(φ)`.

mod param;
mod sentence;
mod shatter;

pub use param::{collinear, parametric_vc_lower_bound, parse_rational, ParametricBound, ParametricFamily};
pub use sentence::{shatter_formula, vc_sentence, VC_SENTENCE_MAX};
pub use shatter::{incidence_graph, shatters, vc_dimension, ShatterWitness, TraceMatrix, VcDimension, SHATTER_SOFT_CAP};
