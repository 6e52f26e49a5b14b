use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};

use super::signature::Signature;

/// Index of `tuple` in the lexicographic order of `[n]^k`, first coordinate most significant.
#[inline]
pub fn tuple_index(n: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &a| acc * n + a)
}

/// Inverse of [`tuple_index`].
pub fn tuple_at(n: usize, k: usize, mut index: usize) -> Vec<usize> {
    let mut t = vec![0; k];
    for slot in t.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
    t
}

/// All tuples of `[n]^k` in lexicographic order.
pub fn tuples(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.checked_pow(k as u32).unwrap_or(0);
    (0..total).map(move |i| tuple_at(n, k, i))
}

/// A finite structure over a [`Signature`].
///
/// Elements are `0..size()`; each carries an opaque display name. Relation
/// tables are dense bit vectors indexed by [`tuple_index`], function tables are
/// total maps stored the same way.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Structure {
    sig: Arc<Signature>,
    names: Arc<[String]>,
    rels: Vec<Vec<bool>>,
    funs: Vec<Vec<usize>>,
    consts: Vec<usize>,
}

impl Structure {
    /// A structure on the given element names with empty relations, and every
    /// function value and constant pointing at the first element.
    pub fn new(sig: Arc<Signature>, names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let distinct: BTreeSet<&String> = names.iter().collect();
        if distinct.len() != names.len() {
            return Err(Error::InvalidStructure("duplicate element names".into()));
        }
        Ok(Self::blank(sig, names.into()))
    }

    /// Same as [`Structure::new`] with elements named `0..n`.
    pub fn with_size(sig: Arc<Signature>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDomain);
        }
        Ok(Self::blank(sig, default_names(n)))
    }

    pub(crate) fn blank(sig: Arc<Signature>, names: Arc<[String]>) -> Self {
        let n = names.len();
        let rels = sig.relations().iter().map(|r| vec![false; n.pow(r.arity as u32)]).collect();
        let funs = sig.functions().iter().map(|f| vec![0; n.pow(f.arity as u32)]).collect();
        let consts = vec![0; sig.constants().len()];
        Structure { sig, names, rels, funs, consts }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn signature_arc(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, e: usize) -> &str {
        &self.names[e]
    }

    pub fn element(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn holds(&self, rel: usize, tuple: &[usize]) -> bool {
        self.rels[rel][tuple_index(self.size(), tuple)]
    }

    pub fn set(&mut self, rel: usize, tuple: &[usize], value: bool) {
        let n = self.size();
        self.rels[rel][tuple_index(n, tuple)] = value;
    }

    pub fn apply(&self, fun: usize, args: &[usize]) -> usize {
        self.funs[fun][tuple_index(self.size(), args)]
    }

    pub fn set_function(&mut self, fun: usize, args: &[usize], value: usize) {
        let n = self.size();
        self.funs[fun][tuple_index(n, args)] = value;
    }

    pub fn constant(&self, c: usize) -> usize {
        self.consts[c]
    }

    pub fn set_constant(&mut self, c: usize, value: usize) {
        self.consts[c] = value;
    }

    pub fn relation_table(&self, rel: usize) -> &[bool] {
        &self.rels[rel]
    }

    pub(crate) fn relation_table_mut(&mut self, rel: usize) -> &mut [bool] {
        &mut self.rels[rel]
    }

    pub fn function_table(&self, fun: usize) -> &[usize] {
        &self.funs[fun]
    }

    pub(crate) fn function_table_mut(&mut self, fun: usize) -> &mut [usize] {
        &mut self.funs[fun]
    }

    pub fn constants(&self) -> &[usize] {
        &self.consts
    }

    /// Tuples in relation `rel`, lexicographically.
    pub fn relation_tuples(&self, rel: usize) -> Vec<Vec<usize>> {
        let n = self.size();
        let k = self.sig.relations()[rel].arity;
        self.rels[rel]
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| tuple_at(n, k, i))
            .collect()
    }

    /// Whether `subset` contains every constant and is closed under every function.
    pub fn is_closed(&self, subset: &[usize]) -> bool {
        let mut member = vec![false; self.size()];
        for &e in subset {
            member[e] = true;
        }
        if self.consts.iter().any(|&c| !member[c]) {
            return false;
        }
        for (f, sym) in self.sig.functions().iter().enumerate() {
            let mut args = vec![0; sym.arity];
            if !closed_under(&self.funs[f], self.size(), subset, &member, &mut args, 0) {
                return false;
            }
        }
        true
    }

    /// The substructure induced on `subset`, whose order fixes the new element indices.
    pub fn induced(&self, subset: &[usize]) -> Result<Structure> {
        if subset.is_empty() {
            return Err(Error::EmptyDomain);
        }
        if !self.is_closed(subset) {
            return Err(Error::InvalidStructure("subset is not closed under the signature's functions and constants".into()));
        }
        Ok(self.induced_unchecked(subset))
    }

    /// Induced structure without the closure check; function values outside the
    /// subset are meaningless, so callers must guarantee closure or a relational signature.
    pub(crate) fn induced_unchecked(&self, subset: &[usize]) -> Structure {
        let n = self.size();
        let m = subset.len();
        let mut pos = vec![usize::MAX; n];
        for (i, &e) in subset.iter().enumerate() {
            pos[e] = i;
        }
        let names: Vec<String> = subset.iter().map(|&e| self.names[e].clone()).collect();
        let mut out = Structure::blank(self.sig.clone(), names.into());
        for (r, sym) in self.sig.relations().iter().enumerate() {
            for (i, t) in tuples(m, sym.arity).enumerate() {
                let orig: Vec<usize> = t.iter().map(|&j| subset[j]).collect();
                out.rels[r][i] = self.rels[r][tuple_index(n, &orig)];
            }
        }
        for (f, sym) in self.sig.functions().iter().enumerate() {
            for (i, t) in tuples(m, sym.arity).enumerate() {
                let orig: Vec<usize> = t.iter().map(|&j| subset[j]).collect();
                let v = self.funs[f][tuple_index(n, &orig)];
                out.funs[f][i] = if pos[v] == usize::MAX { 0 } else { pos[v] };
            }
        }
        for (c, &v) in self.consts.iter().enumerate() {
            out.consts[c] = if pos[v] == usize::MAX { 0 } else { pos[v] };
        }
        out
    }

    /// The same structure with new element names.
    pub fn with_names(&self, names: Vec<String>) -> Result<Structure> {
        if names.len() != self.size() {
            return Err(Error::InvalidStructure(format!("{} names for {} elements", names.len(), self.size())));
        }
        let fresh = Structure::new(self.sig.clone(), names)?;
        Ok(Structure { names: fresh.names, ..self.clone() })
    }

    /// The isomorphic copy in which old element `i` becomes element `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Structure> {
        let n = self.size();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Invalid("relabeling must be a permutation of the domain".into()));
        }
        let mut names = vec![String::new(); n];
        for (i, &p) in perm.iter().enumerate() {
            names[p] = self.names[i].clone();
        }
        let mut out = Structure::blank(self.sig.clone(), names.into());
        for (r, sym) in self.sig.relations().iter().enumerate() {
            for (i, t) in tuples(n, sym.arity).enumerate() {
                if self.rels[r][i] {
                    let image: Vec<usize> = t.iter().map(|&a| perm[a]).collect();
                    out.rels[r][tuple_index(n, &image)] = true;
                }
            }
        }
        for (f, sym) in self.sig.functions().iter().enumerate() {
            for (i, t) in tuples(n, sym.arity).enumerate() {
                let image: Vec<usize> = t.iter().map(|&a| perm[a]).collect();
                out.funs[f][tuple_index(n, &image)] = perm[self.funs[f][i]];
            }
        }
        for (c, &v) in self.consts.iter().enumerate() {
            out.consts[c] = perm[v];
        }
        Ok(out)
    }

    /// Renders the structure in the `structure <name> over <sig> { ... }` text format.
    pub fn to_text(&self, name: &str) -> String {
        let mut parts = vec![format!("dom = {{{}}}", self.names.join(","))];
        for (r, sym) in self.sig.relations().iter().enumerate() {
            let ts: Vec<String> = self
                .relation_tuples(r)
                .iter()
                .map(|t| format!("({})", t.iter().map(|&e| self.names[e].as_str()).collect::<Vec<_>>().join(",")))
                .collect();
            parts.push(format!("{} = {{{}}}", sym.name, ts.join(",")));
        }
        for (f, sym) in self.sig.functions().iter().enumerate() {
            let entries: Vec<String> = tuples(self.size(), sym.arity)
                .enumerate()
                .map(|(i, t)| {
                    let args: Vec<&str> = t.iter().map(|&e| self.names[e].as_str()).collect();
                    let lhs = if sym.arity == 1 { args[0].to_string() } else { format!("({})", args.join(",")) };
                    format!("{}->{}", lhs, self.names[self.funs[f][i]])
                })
                .collect();
            parts.push(format!("{} = {{{}}}", sym.name, entries.join(", ")));
        }
        for (c, name) in self.sig.constants().iter().enumerate() {
            parts.push(format!("{} = {}", name, self.names[self.consts[c]]));
        }
        let mut out = String::new();
        let _ = write!(out, "structure {} over {} {{ {} }}", name, self.sig.name, parts.join("; "));
        out
    }
}

/// Serializes a structure as its text rendering.
pub(crate) fn serialize_text<S: serde::Serializer>(m: &Structure, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&m.to_text("M"))
}

pub(crate) fn serialize_text_opt<S: serde::Serializer>(m: &Option<Structure>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match m {
        Some(m) => serialize_text(m, s),
        None => s.serialize_none(),
    }
}

pub(crate) fn default_names(n: usize) -> Arc<[String]> {
    (0..n).map(|i| i.to_string()).collect::<Vec<_>>().into()
}

fn closed_under(table: &[usize], n: usize, subset: &[usize], member: &[bool], args: &mut Vec<usize>, depth: usize) -> bool {
    if depth == args.len() {
        return member[table[tuple_index(n, args)]];
    }
    for &e in subset {
        args[depth] = e;
        if !closed_under(table, n, subset, member, args, depth + 1) {
            return false;
        }
    }
    true
}

/// An injective map between domains, read as an embedding when verified.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct Morphism {
    pub map: Vec<usize>,
}

impl Morphism {
    pub fn identity(n: usize) -> Self {
        Morphism { map: (0..n).collect() }
    }

    pub fn apply(&self, e: usize) -> usize {
        self.map[e]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Morphism) -> Morphism {
        Morphism { map: self.map.iter().map(|&e| other.map[e]).collect() }
    }

    /// Strong embedding check: injective, preserves and reflects every relation,
    /// commutes with every function and maps constants to constants.
    pub fn is_embedding(&self, source: &Structure, target: &Structure) -> bool {
        if !source.signature().same_symbols(target.signature()) || self.map.len() != source.size() {
            return false;
        }
        let mut seen = vec![false; target.size()];
        for &m in &self.map {
            if m >= target.size() || std::mem::replace(&mut seen[m], true) {
                return false;
            }
        }
        let n = source.size();
        let sig = source.signature();
        for (r, sym) in sig.relations().iter().enumerate() {
            for (i, t) in tuples(n, sym.arity).enumerate() {
                let image: Vec<usize> = t.iter().map(|&a| self.map[a]).collect();
                if source.rels[r][i] != target.holds(r, &image) {
                    return false;
                }
            }
        }
        for (f, sym) in sig.functions().iter().enumerate() {
            for (i, t) in tuples(n, sym.arity).enumerate() {
                let image: Vec<usize> = t.iter().map(|&a| self.map[a]).collect();
                if self.map[source.funs[f][i]] != target.apply(f, &image) {
                    return false;
                }
            }
        }
        source.consts.iter().zip(&target.consts).all(|(&a, &b)| self.map[a] == b)
    }
}
