//! Signatures, finite structures, substructures and canonical forms.

mod canon;
mod enumerate;
mod signature;
mod structure;
pub mod text;

pub use canon::{canonical_form, canonicalize, canonicalize_with, isomorphic, isomorphic_with, CanonicalForm, IsoClassId};
pub use enumerate::{
    closed_subsets, closure, count_structures, enumerate_structures, for_each_combination, generated_substructure,
    substructures, StructureIter,
};
pub(crate) use signature::is_identifier;
pub use signature::{Signature, Symbol, SymbolKind};
pub(crate) use structure::{serialize_text, serialize_text_opt};
pub use structure::{tuple_at, tuple_index, tuples, Morphism, Structure};
