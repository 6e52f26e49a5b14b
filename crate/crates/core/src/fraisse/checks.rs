//! Bounded checks of the hereditary, joint embedding and amalgamation properties.

use std::cell::Cell;
use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::config::Limits;
use crate::error::Result;
use crate::falsify::ClassSpec;
use crate::sigstruct::{canonical_form, closed_subsets, closure, for_each_combination, tuples, IsoClassId, Morphism, Structure};

use super::search::{embeddings, Oracle, Slot};

/// Canonical ids of every substructure generated by a nonempty subset of `m`.
pub fn age(m: &Structure, limits: &Limits) -> Result<BTreeSet<IsoClassId>> {
    age_up_to(m, m.size(), limits)
}

/// The part of the age generated by at most `k` elements.
pub fn age_up_to(m: &Structure, k: usize, limits: &Limits) -> Result<BTreeSet<IsoClassId>> {
    let k = k.min(m.size());
    let mut subsets: u128 = 0;
    let mut binom: u128 = 1;
    for i in 1..=k {
        binom = binom * (m.size() - i + 1) as u128 / i as u128;
        subsets += binom;
    }
    if subsets > limits.enumeration as u128 {
        return Err(crate::Error::budget("age of a structure", subsets, limits.enumeration));
    }
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::new();
    for i in 1..=k {
        let mut err = None;
        for_each_combination(m.size(), i, |seed| {
            if err.is_some() {
                return;
            }
            let dom = match closure(m, seed, m.size()) {
                Ok(d) => d,
                Err(e) => return err = Some(e),
            };
            if seen.insert(dom.clone()) {
                match canonical_form(&m.induced_unchecked(&dom), limits) {
                    Ok(f) => {
                        out.insert(f.id);
                    }
                    Err(e) => err = Some(e),
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
    }
    Ok(out)
}

/// `f_N: M → N` and `f_Q: M → Q`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AmalgamProblem {
    #[serde(serialize_with = "crate::sigstruct::serialize_text")]
    pub base: Structure,
    #[serde(serialize_with = "crate::sigstruct::serialize_text")]
    pub n: Structure,
    #[serde(serialize_with = "crate::sigstruct::serialize_text")]
    pub q: Structure,
    pub f_n: Morphism,
    pub f_q: Morphism,
}

/// A structure `S` with `g_N ∘ f_N = g_Q ∘ f_Q`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Amalgam {
    #[serde(serialize_with = "crate::sigstruct::serialize_text")]
    pub s: Structure,
    pub g_n: Morphism,
    pub g_q: Morphism,
}

impl AmalgamProblem {
    pub fn new(base: Structure, n: Structure, q: Structure, f_n: Morphism, f_q: Morphism) -> Result<AmalgamProblem> {
        if !f_n.is_embedding(&base, &n) || !f_q.is_embedding(&base, &q) {
            return Err(crate::Error::Invalid("amalgamation problem maps must be embeddings".into()));
        }
        Ok(AmalgamProblem { base, n, q, f_n, f_q })
    }

    /// Largest amalgam searched: `|N| + |Q| − |M|`.
    pub fn amalgam_bound(&self) -> usize {
        self.n.size() + self.q.size() - self.base.size()
    }

    /// Re-runs the exhaustive amalgam search.
    pub fn solve(&self, class: &ClassSpec, strong: bool, limits: &Limits) -> Result<Option<Amalgam>> {
        let oracle = Oracle::new(class)?;
        let pairs: Vec<(usize, usize)> = self.f_n.map.iter().copied().zip(self.f_q.map.iter().copied()).collect();
        amalgamate(&oracle, &self.n, &self.q, &pairs, strong, limits, &Cell::new(0))
    }
}

impl fmt::Display for AmalgamProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.base.to_text("M"))?;
        writeln!(f, "{}", self.n.to_text("N"))?;
        writeln!(f, "{}", self.q.to_text("Q"))?;
        write!(f, "f_N = {:?}; f_Q = {:?}", self.f_n.map, self.f_q.map)
    }
}

/// A member with a generated substructure outside the class.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HpFailure {
    #[serde(serialize_with = "crate::sigstruct::serialize_text")]
    pub member: Structure,
    pub substructure: Vec<usize>,
}

impl HpFailure {
    pub fn substructure(&self) -> Structure {
        self.member.induced(&self.substructure).expect("witness domain is closed")
    }
}

/// Two members with no common extension among the searched members.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JepFailure {
    #[serde(serialize_with = "crate::sigstruct::serialize_text")]
    pub m: Structure,
    #[serde(serialize_with = "crate::sigstruct::serialize_text")]
    pub n: Structure,
    /// Largest joint extension searched.
    pub searched_up_to: usize,
}

/// Outcome of one property check up to a size bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyCheck<W> {
    pub holds: bool,
    /// Instances examined.
    pub checked: usize,
    pub counterexample: Option<W>,
}

impl<W> PropertyCheck<W> {
    fn pass(checked: usize) -> PropertyCheck<W> {
        PropertyCheck { holds: true, checked, counterexample: None }
    }

    fn fail(checked: usize, w: W) -> PropertyCheck<W> {
        PropertyCheck { holds: false, checked, counterexample: Some(w) }
    }
}

/// The three checks over members of size at most `bound`. Amalgams and
/// joint extensions are searched among structures whose domain is the union
/// of the two images, which is complete when the class is hereditary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FraisseReport {
    pub class: String,
    pub bound: usize,
    pub strong: bool,
    pub hp: PropertyCheck<HpFailure>,
    pub jep: PropertyCheck<JepFailure>,
    pub ap: PropertyCheck<AmalgamProblem>,
}

impl FraisseReport {
    pub fn is_fraisse(&self) -> bool {
        self.hp.holds && self.jep.holds && self.ap.holds
    }
}

pub fn check_fraisse(class: &ClassSpec, bound: usize, strong: bool, limits: &Limits) -> Result<FraisseReport> {
    Ok(FraisseReport {
        class: class.name.clone(),
        bound,
        strong,
        hp: check_hp(class, bound, limits)?,
        jep: check_jep(class, bound, limits)?,
        ap: check_ap(class, bound, strong, limits)?,
    })
}

/// Every generated substructure of every member up to `bound` is a member.
/// Larger substructures are tried first.
pub fn check_hp(class: &ClassSpec, bound: usize, limits: &Limits) -> Result<PropertyCheck<HpFailure>> {
    let mut checked = 0;
    for m in class.members_up_to(bound, limits)? {
        let mut subs = closed_subsets(&m, m.size() - 1);
        subs.sort_by_key(|d| std::cmp::Reverse(d.len()));
        for d in subs {
            checked += 1;
            if !class.contains(&m.induced(&d)?)? {
                return Ok(PropertyCheck::fail(checked, HpFailure { member: m, substructure: d }));
            }
        }
    }
    Ok(PropertyCheck::pass(checked))
}

/// Every pair of members up to `bound` embeds jointly into a member of size
/// at most the sum of their sizes.
pub fn check_jep(class: &ClassSpec, bound: usize, limits: &Limits) -> Result<PropertyCheck<JepFailure>> {
    let oracle = Oracle::new(class)?;
    let members = class.members_up_to(bound, limits)?;
    let nodes = Cell::new(0);
    let mut checked = 0;
    for (i, a) in members.iter().enumerate() {
        for b in &members[i..] {
            checked += 1;
            if amalgamate(&oracle, a, b, &[], false, limits, &nodes)?.is_none() {
                let w = JepFailure { m: a.clone(), n: b.clone(), searched_up_to: a.size() + b.size() };
                return Ok(PropertyCheck::fail(checked, w));
            }
        }
    }
    Ok(PropertyCheck::pass(checked))
}

/// Embeddings of `base` into members up to `bound` that enlarge it, one per
/// orbit of the automorphism group of the target.
fn extensions(base: &Structure, members: &[Structure], bound: usize) -> Vec<(usize, Vec<usize>)> {
    let mut out = Vec::new();
    for (i, n) in members.iter().enumerate() {
        if n.size() <= base.size() || n.size() > bound {
            continue;
        }
        let auts = embeddings(n, n);
        let mut seen = BTreeSet::new();
        for f in embeddings(base, n) {
            let key = auts.iter().map(|a| f.iter().map(|&e| a[e]).collect::<Vec<_>>()).min().unwrap_or_else(|| f.clone());
            if seen.insert(key) {
                out.push((i, f));
            }
        }
    }
    out
}

/// Every amalgamation problem over members with `|N|, |Q| ≤ bound` has an
/// amalgam in the class of size at most `|N| + |Q| − |M|`. Problems where one
/// side is the base itself are trivially solved and skipped.
pub fn check_ap(class: &ClassSpec, bound: usize, strong: bool, limits: &Limits) -> Result<PropertyCheck<AmalgamProblem>> {
    let oracle = Oracle::new(class)?;
    let members = class.members_up_to(bound, limits)?;
    let nodes = Cell::new(0);
    let mut checked = 0;
    for base in members.iter().filter(|m| m.size() < bound) {
        let exts = extensions(base, &members, bound);
        for (i, (a, fa)) in exts.iter().enumerate() {
            for (b, fb) in &exts[i..] {
                checked += 1;
                let pairs: Vec<(usize, usize)> = fa.iter().copied().zip(fb.iter().copied()).collect();
                if amalgamate(&oracle, &members[*a], &members[*b], &pairs, strong, limits, &nodes)?.is_none() {
                    let problem = AmalgamProblem {
                        base: base.clone(),
                        n: members[*a].clone(),
                        q: members[*b].clone(),
                        f_n: Morphism { map: fa.clone() },
                        f_q: Morphism { map: fb.clone() },
                    };
                    return Ok(PropertyCheck::fail(checked, problem));
                }
            }
        }
    }
    Ok(PropertyCheck::pass(checked))
}

/// Partial injections from `from` into `into`, fewest identifications first.
fn identifications(from: usize, into: &[usize], strong: bool) -> Vec<Vec<Option<usize>>> {
    fn go(i: usize, from: usize, into: &[usize], used: &mut Vec<bool>, cur: &mut Vec<Option<usize>>, out: &mut Vec<Vec<Option<usize>>>, strong: bool) {
        if i == from {
            out.push(cur.clone());
            return;
        }
        cur.push(None);
        go(i + 1, from, into, used, cur, out, strong);
        cur.pop();
        if strong {
            return;
        }
        for (j, &e) in into.iter().enumerate() {
            if !used[j] {
                used[j] = true;
                cur.push(Some(e));
                go(i + 1, from, into, used, cur, out, strong);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(0, from, into, &mut vec![false; into.len()], &mut Vec::new(), &mut out, strong);
    out.sort_by_key(|v| v.iter().filter(|x| x.is_some()).count());
    out
}

/// Searches for `S` containing `n` as a prefix and `q` embedded so that
/// `pairs` (element of `n`, element of `q`) are identified.
pub(crate) fn amalgamate(
    oracle: &Oracle,
    n: &Structure,
    q: &Structure,
    pairs: &[(usize, usize)],
    strong: bool,
    limits: &Limits,
    nodes: &Cell<u64>,
) -> Result<Option<Amalgam>> {
    let sig = n.signature_arc().clone();
    let mut g_q_base = vec![None; q.size()];
    for &(a, b) in pairs {
        g_q_base[b] = Some(a);
    }
    let n_out: Vec<usize> = (0..n.size()).filter(|e| !pairs.iter().any(|p| p.0 == *e)).collect();
    let q_out: Vec<usize> = (0..q.size()).filter(|&e| g_q_base[e].is_none()).collect();
    for ident in identifications(q_out.len(), &n_out, strong) {
        let mut g_q = g_q_base.clone();
        let mut size = n.size();
        for (&e, target) in q_out.iter().zip(&ident) {
            g_q[e] = Some(target.unwrap_or_else(|| {
                size += 1;
                size - 1
            }));
        }
        let g_q: Vec<usize> = g_q.into_iter().map(|e| e.expect("every element placed")).collect();
        let mut s = Structure::with_size(sig.clone(), size)?;
        let mut in_q = vec![false; size];
        for &e in &g_q {
            in_q[e] = true;
        }
        let mut clash = false;
        let mut free: Vec<Slot> = Vec::new();
        for (r, sym) in sig.relations().iter().enumerate() {
            for t in tuples(n.size(), sym.arity) {
                s.set(r, &t, n.holds(r, &t));
            }
            for t in tuples(q.size(), sym.arity) {
                let image: Vec<usize> = t.iter().map(|&e| g_q[e]).collect();
                let v = q.holds(r, &t);
                if image.iter().all(|&e| e < n.size()) {
                    clash |= n.holds(r, &image) != v;
                } else {
                    s.set(r, &image, v);
                }
            }
            for t in tuples(size, sym.arity) {
                if !t.iter().all(|&e| e < n.size()) && !t.iter().all(|&e| in_q[e]) {
                    free.push((r, t));
                }
            }
        }
        if clash {
            continue;
        }
        let new: Vec<bool> = (0..size).map(|e| e >= n.size()).collect();
        if oracle.complete(&mut s, &free, &[], &new, &|_| false, limits, nodes)? {
            return Ok(Some(Amalgam { s, g_n: Morphism::identity(n.size()), g_q: Morphism { map: g_q } }));
        }
    }
    Ok(None)
}
