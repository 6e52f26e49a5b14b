//! Canonical labeling.
//!
//! A labeling is an ordering of the domain. Its code lists, for each position
//! `i`, the bits of every tuple whose largest position is `i`, relation by
//! relation in lexicographic tuple order. Functions contribute the bits of
//! their graphs and constants contribute unary bits, so the code determines
//! the structure. The canonical code is the least code over all orderings that
//! respect a colour refinement of the domain; codes are compared block by
//! block, which lets the search discard a prefix as soon as one of its blocks
//! exceeds the best known one. Automorphisms found at tied leaves prune
//! sibling branches in the same orbit.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::config::Limits;
use crate::error::{Error, Result};

use super::structure::{tuple_at, Morphism, Structure};

/// Canonical certificate of an isomorphism class. Ordered by domain size and then code.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IsoClassId(Vec<u8>);

impl IsoClassId {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        if s.len() % 2 != 0 {
            return Err(Error::Invalid(format!("odd-length hex id `{s}`")));
        }
        (0..s.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&s[i..i + 2], 16).map_err(|_| Error::Invalid(format!("bad hex id `{s}`"))))
            .collect::<Result<Vec<u8>>>()
            .map(IsoClassId)
    }

    /// Domain size encoded in the id.
    pub fn size(&self) -> usize {
        u16::from_be_bytes([self.0[0], self.0[1]]) as usize
    }
}

impl fmt::Display for IsoClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for IsoClassId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

/// A canonical id together with the labeling that attains it.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub id: IsoClassId,
    /// `order[p]` is the element placed at position `p`.
    pub order: Vec<usize>,
}

impl CanonicalForm {
    /// The canonically relabeled copy of the structure.
    pub fn apply(&self, m: &Structure) -> Structure {
        let mut perm = vec![0; self.order.len()];
        for (p, &e) in self.order.iter().enumerate() {
            perm[e] = p;
        }
        m.relabel(&perm).expect("canonical order is a permutation")
    }
}

pub fn canonicalize(m: &Structure) -> Result<IsoClassId> {
    Ok(canonical_form(m, &Limits::default())?.id)
}

pub fn canonicalize_with(m: &Structure, limits: &Limits) -> Result<IsoClassId> {
    Ok(canonical_form(m, limits)?.id)
}

/// Returns a bijective embedding `m → n` when the structures are isomorphic.
pub fn isomorphic(m: &Structure, n: &Structure) -> Result<Option<Morphism>> {
    isomorphic_with(m, n, &Limits::default())
}

pub fn isomorphic_with(m: &Structure, n: &Structure, limits: &Limits) -> Result<Option<Morphism>> {
    m.signature().ensure_same(n.signature())?;
    if m.size() != n.size() {
        return Ok(None);
    }
    let a = canonical_form(m, limits)?;
    let b = canonical_form(n, limits)?;
    if a.id != b.id {
        return Ok(None);
    }
    let mut map = vec![0; m.size()];
    for (p, &e) in a.order.iter().enumerate() {
        map[e] = b.order[p];
    }
    Ok(Some(Morphism { map }))
}

#[derive(Clone, Copy)]
enum Part {
    Rel(usize),
    Fun(usize),
    Const(usize),
}

struct Coder<'a> {
    m: &'a Structure,
    parts: Vec<(Part, usize)>,
}

impl Coder<'_> {
    fn new(m: &Structure) -> Coder<'_> {
        let sig = m.signature();
        let mut parts: Vec<(Part, usize)> = Vec::new();
        parts.extend(sig.relations().iter().enumerate().map(|(i, s)| (Part::Rel(i), s.arity)));
        parts.extend(sig.functions().iter().enumerate().map(|(i, s)| (Part::Fun(i), s.arity + 1)));
        parts.extend((0..sig.constants().len()).map(|i| (Part::Const(i), 1)));
        Coder { m, parts }
    }

    fn bit(&self, part: Part, elems: &[usize]) -> bool {
        match part {
            Part::Rel(r) => self.m.holds(r, elems),
            Part::Fun(f) => {
                let (args, val) = elems.split_at(elems.len() - 1);
                self.m.apply(f, args) == val[0]
            }
            Part::Const(c) => self.m.constant(c) == elems[0],
        }
    }

    /// Appends the block of position `i` for the partial order `order[..=i]`.
    fn block(&self, order: &[usize], i: usize, out: &mut Vec<u8>) {
        let mut elems = Vec::new();
        for &(part, arity) in &self.parts {
            for idx in 0..(i + 1).pow(arity as u32) {
                let pos = tuple_at(i + 1, arity, idx);
                if pos.contains(&i) {
                    elems.clear();
                    elems.extend(pos.iter().map(|&p| order[p]));
                    out.push(self.bit(part, &elems) as u8);
                }
            }
        }
    }
}

/// Colour refinement; returns colour ranks that are invariant under isomorphism.
fn refine(coder: &Coder<'_>) -> Vec<usize> {
    let n = coder.m.size();
    let mut colors = vec![0usize; n];
    let mut classes = 1;
    loop {
        let mut sigs: Vec<Vec<Vec<usize>>> = Vec::with_capacity(n);
        for a in 0..n {
            let mut sig = vec![vec![colors[a]]];
            for &(part, arity) in &coder.parts {
                for j in 0..arity {
                    let mut entries: Vec<Vec<usize>> = Vec::new();
                    let others = n.pow(arity as u32 - 1);
                    let mut elems = vec![0; arity];
                    for idx in 0..others {
                        let mut rest = idx;
                        for k in (0..arity).rev() {
                            if k == j {
                                continue;
                            }
                            elems[k] = rest % n;
                            rest /= n;
                        }
                        elems[j] = a;
                        if coder.bit(part, &elems) {
                            entries.push(elems.iter().map(|&e| colors[e]).collect());
                        }
                    }
                    entries.sort();
                    sig.push(vec![entries.len()]);
                    sig.extend(entries);
                }
            }
            sigs.push(sig);
        }
        let mut distinct: Vec<&Vec<Vec<usize>>> = sigs.iter().collect();
        distinct.sort();
        distinct.dedup();
        let next: Vec<usize> = sigs.iter().map(|s| distinct.binary_search(&s).unwrap()).collect();
        let count = distinct.len();
        colors = next;
        if count == classes {
            return colors;
        }
        classes = count;
    }
}

struct Search<'a> {
    coder: Coder<'a>,
    n: usize,
    cell: Vec<usize>,
    colors: Vec<usize>,
    order: Vec<usize>,
    used: Vec<bool>,
    code: Vec<u8>,
    offsets: Vec<usize>,
    best: Option<(Vec<u8>, Vec<usize>)>,
    generators: Vec<Vec<usize>>,
}

impl Search<'_> {
    /// Explores the subtree below `order[..depth]`. Returns whether the best
    /// code was replaced inside it.
    fn dfs(&mut self, depth: usize, mut tied: bool) -> bool {
        if depth == self.n {
            return if self.best.is_none() || !tied {
                self.best = Some((self.code.clone(), self.order.clone()));
                true
            } else {
                let (_, best_order) = self.best.as_ref().unwrap();
                let mut g = vec![0; self.n];
                for (b, &c) in best_order.iter().zip(&self.order) {
                    g[*b] = c;
                }
                if g.iter().enumerate().any(|(i, &x)| i != x) {
                    self.generators.push(g);
                }
                false
            };
        }
        let mut replaced = false;
        let mut explored: Vec<usize> = Vec::new();
        let candidates: Vec<usize> = (0..self.n).filter(|&e| !self.used[e] && self.colors[e] == self.cell[depth]).collect();
        for v in candidates {
            if !explored.is_empty() && self.same_orbit(depth, &explored, v) {
                continue;
            }
            explored.push(v);
            self.order.push(v);
            self.used[v] = true;
            let start = self.code.len();
            self.coder.block(&self.order, depth, &mut self.code);
            let mut child_tied = tied;
            let mut pruned = false;
            if tied {
                if let Some((best, _)) = &self.best {
                    let end = self.offsets[depth + 1];
                    match self.code[start..].cmp(&best[self.offsets[depth]..end]) {
                        std::cmp::Ordering::Greater => pruned = true,
                        std::cmp::Ordering::Less => child_tied = false,
                        std::cmp::Ordering::Equal => {}
                    }
                }
            }
            if !pruned && self.dfs(depth + 1, child_tied) {
                replaced = true;
                tied = true;
            }
            self.code.truncate(start);
            self.used[v] = false;
            self.order.pop();
        }
        replaced
    }

    /// Whether `v` lies in the orbit of an explored candidate under the known
    /// automorphisms that fix the current prefix pointwise.
    fn same_orbit(&self, depth: usize, explored: &[usize], v: usize) -> bool {
        let prefix = &self.order[..depth];
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        let mut any = false;
        for g in &self.generators {
            if prefix.iter().all(|&e| g[e] == e) {
                any = true;
                for x in 0..self.n {
                    let (a, b) = (find(&mut parent, x), find(&mut parent, g[x]));
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
        if !any {
            return false;
        }
        let rv = find(&mut parent, v);
        explored.iter().any(|&u| find(&mut parent, u) == rv)
    }
}

/// Canonical id and labeling of `m`; fails when `m` exceeds `limits.canon_size`.
pub fn canonical_form(m: &Structure, limits: &Limits) -> Result<CanonicalForm> {
    let n = m.size();
    if n > limits.canon_size {
        return Err(Error::budget("canonical labeling", format!("{n} elements"), format!("{} elements", limits.canon_size)));
    }
    let coder = Coder::new(m);
    let colors = refine(&coder);
    let mut cell = colors.clone();
    cell.sort_unstable();
    let mut offsets = vec![0];
    for i in 0..n {
        let bits: usize = coder.parts.iter().map(|&(_, a)| (i + 1).pow(a as u32) - i.pow(a as u32)).sum();
        offsets.push(offsets[i] + bits);
    }
    let mut search = Search {
        coder,
        n,
        cell,
        colors,
        order: Vec::with_capacity(n),
        used: vec![false; n],
        code: Vec::with_capacity(offsets[n]),
        offsets,
        best: None,
        generators: Vec::new(),
    };
    search.dfs(0, true);
    let (code, order) = search.best.expect("nonempty domain has a labeling");
    let mut bytes = (n as u16).to_be_bytes().to_vec();
    for chunk in code.chunks(8) {
        bytes.push(chunk.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | (b << (7 - i))));
    }
    Ok(CanonicalForm { id: IsoClassId(bytes), order })
}
