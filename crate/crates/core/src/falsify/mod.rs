//! Falsifiable content of classes: forbidden configurations, falsifiability
//! verdicts and refutation by observations.

mod class;
mod derived;
mod forbid;
mod refute;

pub use class::{ClassKind, ClassSpec};
pub use derived::{parse_definition, rewrite_derived_relation, Definition};
pub(crate) use forbid::for_each_injection;
pub use forbid::{
    falsifiable_at, forbidden_configurations, relative_falsifiability_at, Diagram, Falsifiability, ForbiddenSet, Literal,
    RelativeVerdict,
};
pub use refute::{refute, GroundLiteral, ObservationSet, RefutationReport, Verdict};
