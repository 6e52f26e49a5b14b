//! Finite and irrevocable testability at bounded scale, and the universal
//! axiomatizations `ψ_n` and closure formulas `χ_n`.

mod fit;
mod synth;

pub use fit::{check_fg_fit, check_fit, FitReport, IrrevocabilityWitness, SubstructureNotion};
pub use synth::{labeled_members, synthesize_chi, synthesize_psi};
