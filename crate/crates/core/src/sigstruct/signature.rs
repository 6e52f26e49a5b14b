use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A relation or function symbol together with its arity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

/// What kind of symbol a name refers to in a [`Signature`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    Relation(usize),
    Function(usize),
    Constant(usize),
}

/// The observable vocabulary: relation, function and constant symbols.
///
/// Symbol order is significant. It fixes the layout of structure tables, the
/// enumeration order of [`enumerate_structures`](super::enumerate_structures)
/// and the byte layout of canonical ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Signature {
    pub name: String,
    relations: Vec<Symbol>,
    functions: Vec<Symbol>,
    constants: Vec<String>,
}

impl Signature {
    pub fn new(name: impl Into<String>) -> Self {
        Signature { name: name.into(), relations: Vec::new(), functions: Vec::new(), constants: Vec::new() }
    }

    pub fn with_relation(mut self, name: &str, arity: usize) -> Result<Self> {
        self.add_relation(name, arity)?;
        Ok(self)
    }

    pub fn with_function(mut self, name: &str, arity: usize) -> Result<Self> {
        self.add_function(name, arity)?;
        Ok(self)
    }

    pub fn with_constant(mut self, name: &str) -> Result<Self> {
        self.add_constant(name)?;
        Ok(self)
    }

    pub fn add_relation(&mut self, name: &str, arity: usize) -> Result<usize> {
        self.check_fresh(name, arity)?;
        self.relations.push(Symbol { name: name.to_string(), arity });
        Ok(self.relations.len() - 1)
    }

    pub fn add_function(&mut self, name: &str, arity: usize) -> Result<usize> {
        self.check_fresh(name, arity)?;
        self.functions.push(Symbol { name: name.to_string(), arity });
        Ok(self.functions.len() - 1)
    }

    pub fn add_constant(&mut self, name: &str) -> Result<usize> {
        self.check_fresh(name, 1)?;
        self.constants.push(name.to_string());
        Ok(self.constants.len() - 1)
    }

    fn check_fresh(&self, name: &str, arity: usize) -> Result<()> {
        if arity == 0 {
            return Err(Error::InvalidSignature(format!("`{name}` must have positive arity")));
        }
        if !is_identifier(name) {
            return Err(Error::InvalidSignature(format!("`{name}` is not a valid symbol name")));
        }
        if self.lookup(name).is_some() {
            return Err(Error::InvalidSignature(format!("symbol `{name}` declared twice")));
        }
        Ok(())
    }

    pub fn relations(&self) -> &[Symbol] {
        &self.relations
    }

    pub fn functions(&self) -> &[Symbol] {
        &self.functions
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolKind> {
        if let Some(i) = self.relation_index(name) {
            return Some(SymbolKind::Relation(i));
        }
        if let Some(i) = self.function_index(name) {
            return Some(SymbolKind::Function(i));
        }
        self.constant_index(name).map(SymbolKind::Constant)
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|s| s.name == name)
    }

    pub fn function_index(&self, name: &str) -> Option<usize> {
        self.functions.iter().position(|s| s.name == name)
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|c| c == name)
    }

    /// True when the signature has neither function nor constant symbols.
    pub fn is_relational(&self) -> bool {
        self.functions.is_empty() && self.constants.is_empty()
    }

    /// Same symbols in the same order; the signature name is ignored.
    pub fn same_symbols(&self, other: &Signature) -> bool {
        self.relations == other.relations && self.functions == other.functions && self.constants == other.constants
    }

    pub fn ensure_same(&self, other: &Signature) -> Result<()> {
        if self.same_symbols(other) {
            Ok(())
        } else {
            Err(Error::SignatureMismatch(format!("`{}` vs `{}`", self.name, other.name)))
        }
    }

    /// Union of two signatures; shared names must agree on kind and arity.
    pub fn merge(&self, other: &Signature) -> Result<Signature> {
        let mut out = self.clone();
        for r in &other.relations {
            match out.lookup(&r.name) {
                None => {
                    out.add_relation(&r.name, r.arity)?;
                }
                Some(SymbolKind::Relation(i)) if out.relations[i].arity == r.arity => {}
                _ => return Err(Error::SignatureMismatch(format!("conflicting declarations of `{}`", r.name))),
            }
        }
        for f in &other.functions {
            match out.lookup(&f.name) {
                None => {
                    out.add_function(&f.name, f.arity)?;
                }
                Some(SymbolKind::Function(i)) if out.functions[i].arity == f.arity => {}
                _ => return Err(Error::SignatureMismatch(format!("conflicting declarations of `{}`", f.name))),
            }
        }
        for c in &other.constants {
            match out.lookup(c) {
                None => {
                    out.add_constant(c)?;
                }
                Some(SymbolKind::Constant(_)) => {}
                _ => return Err(Error::SignatureMismatch(format!("conflicting declarations of `{c}`"))),
            }
        }
        Ok(out)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .relations
            .iter()
            .map(|r| format!("rel {}/{}", r.name, r.arity))
            .chain(self.functions.iter().map(|g| format!("fun {}/{}", g.name, g.arity)))
            .chain(self.constants.iter().map(|c| format!("const {c}")))
            .collect();
        if items.is_empty() {
            write!(f, "sig {} {{ }}", self.name)
        } else {
            write!(f, "sig {} {{ {} }}", self.name, items.join("; "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_zero_arity() {
        let sig = Signature::new("s").with_relation("R", 2).unwrap();
        assert!(sig.clone().with_function("R", 1).is_err());
        assert!(sig.clone().with_constant("R").is_err());
        assert!(Signature::new("t").with_relation("P", 0).is_err());
    }

    #[test]
    fn display_matches_text_format() {
        let sig = Signature::new("g")
            .with_relation("R", 2)
            .unwrap()
            .with_function("f", 1)
            .unwrap()
            .with_constant("c0")
            .unwrap();
        assert_eq!(sig.to_string(), "sig g { rel R/2; fun f/1; const c0 }");
    }

    #[test]
    fn merge_rejects_conflicts() {
        let a = Signature::new("a").with_relation("R", 2).unwrap();
        let b = Signature::new("b").with_relation("R", 3).unwrap();
        assert!(a.merge(&b).is_err());
        let c = Signature::new("c").with_function("f", 1).unwrap();
        let m = a.merge(&c).unwrap();
        assert_eq!(m.relations().len(), 1);
        assert_eq!(m.functions().len(), 1);
    }
}
