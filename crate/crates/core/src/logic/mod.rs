//! First-order syntax, normal forms, classification and evaluation.

mod ast;
mod eval;
mod normal;
mod parse;
mod print;
mod theory;

use serde::Serialize;

use crate::error::{Error, Result};

pub use ast::{conj, disj, Formula, Quantifier, Term};
pub use eval::{evaluate, satisfies, Assignment, Compiled, UniversalSentence};
pub(crate) use eval::{eval3, Partial};
pub use normal::{classify_syntax, miniscope, nnf, prenex_level, rename_apart, simplify, to_prenex, PrenexLevel, SyntaxClass};
pub use parse::{parse_formula, parse_formula_extending, parse_formula_infer, parse_partitioned};
pub use print::canonical_names;
pub use theory::Theory;

/// A formula `φ(x̄; ȳ)` with its free variables split into object variables
/// and parameter variables.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionedFormula {
    #[serde(serialize_with = "as_text")]
    pub formula: Formula,
    pub objects: Vec<String>,
    pub params: Vec<String>,
}

fn as_text<S: serde::Serializer>(f: &Formula, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&f.to_string())
}

impl PartitionedFormula {
    pub fn new(formula: Formula, objects: Vec<String>, params: Vec<String>) -> Result<Self> {
        if let Some(v) = objects.iter().find(|v| params.contains(v)) {
            return Err(Error::Invalid(format!("`{v}` is both an object and a parameter variable")));
        }
        if objects.is_empty() || params.is_empty() {
            return Err(Error::Invalid("partitioned formulas need object and parameter variables".into()));
        }
        let free = formula.free_vars();
        if let Some(v) = free.iter().find(|v| !objects.contains(v) && !params.contains(v)) {
            return Err(Error::UnboundVariable(v.clone()));
        }
        Ok(PartitionedFormula { formula, objects, params })
    }

    /// Free-variable order used for compilation: objects, then parameters.
    pub fn slots(&self) -> Vec<String> {
        self.objects.iter().chain(&self.params).cloned().collect()
    }
}

impl std::fmt::Display for PartitionedFormula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{} ; {}] {}", self.objects.join(","), self.params.join(","), self.formula)
    }
}
