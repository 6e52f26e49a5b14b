//! Forbidden configurations: the bounded universal content of a class.
//!
//! A diagram over `x1..xk` is a consistent set of relational literals, read
//! with the variables denoting pairwise distinct elements. It is realized in
//! `M` when some injective assignment satisfies every literal. For each `k`
//! the realized complete diagrams are collected from the members, then closed
//! downwards over a ternary table (digit 0 absent, 1 positive, 2 negative).

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::logic::{conj, Formula, Term, Theory};
use crate::sigstruct::{tuple_index, tuples, Signature, Structure};

use super::class::ClassSpec;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Literal {
    pub relation: String,
    #[serde(skip)]
    pub rel: usize,
    /// Variable indices, 0-based (`0` is `x1`).
    pub args: Vec<usize>,
    pub positive: bool,
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.args.iter().map(|a| format!("x{}", a + 1)).collect();
        write!(f, "{}{}({})", if self.positive { "" } else { "!" }, self.relation, args.join(","))
    }
}

/// A conjunction of literals over `x1..x{vars}`, variables pairwise distinct.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Diagram {
    pub vars: usize,
    pub literals: Vec<Literal>,
}

impl Diagram {
    pub fn new(vars: usize, mut literals: Vec<Literal>) -> Result<Diagram> {
        if vars == 0 {
            return Err(Error::Invalid("diagrams need at least one variable".into()));
        }
        for l in &literals {
            if let Some(a) = l.args.iter().find(|&&a| a >= vars) {
                return Err(Error::Invalid(format!("variable x{} outside x1..x{vars}", a + 1)));
            }
        }
        literals.sort_by(|a, b| key(a).cmp(&key(b)));
        literals.dedup();
        for w in literals.windows(2) {
            if w[0].rel == w[1].rel && w[0].args == w[1].args {
                return Err(Error::Invalid(format!("{} is contradictory", Diagram { vars, literals: w.to_vec() })));
            }
        }
        Ok(Diagram { vars, literals })
    }

    /// Builds a diagram from `(relation, args, positive)` triples resolved against `sig`.
    pub fn from_literals(sig: &Signature, vars: usize, lits: &[(&str, &[usize], bool)]) -> Result<Diagram> {
        let mut out = Vec::new();
        for &(name, args, positive) in lits {
            let rel = sig.relation_index(name).ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
            let arity = sig.relations()[rel].arity;
            if arity != args.len() {
                return Err(Error::Arity { symbol: name.to_string(), expected: arity, got: args.len() });
            }
            out.push(Literal { relation: name.to_string(), rel, args: args.to_vec(), positive });
        }
        Diagram::new(vars, out)
    }

    fn used(&self) -> Vec<bool> {
        let mut used = vec![false; self.vars];
        for l in &self.literals {
            for &a in &l.args {
                used[a] = true;
            }
        }
        used
    }

    /// The representative under variable renaming: the lexicographically
    /// least sorted literal list over all permutations of the variables.
    pub fn canonical(&self) -> Diagram {
        let mut best: Option<Vec<Literal>> = None;
        for perm in permutations(self.vars) {
            let mut lits: Vec<Literal> = self
                .literals
                .iter()
                .map(|l| Literal { args: l.args.iter().map(|&a| perm[a]).collect(), ..l.clone() })
                .collect();
            lits.sort_by(|a, b| key(a).cmp(&key(b)));
            let better = match &best {
                None => true,
                Some(b) => lits.iter().map(key).lt(b.iter().map(key)),
            };
            if better {
                best = Some(lits);
            }
        }
        Diagram { vars: self.vars, literals: best.unwrap_or_default() }
    }

    pub fn var_names(&self) -> Vec<String> {
        (1..=self.vars).map(|i| format!("x{i}")).collect()
    }

    /// The conjunction of the literals, free in `x1..xk`.
    pub fn formula(&self) -> Formula {
        conj(self
            .literals
            .iter()
            .map(|l| {
                let atom = Formula::Rel(l.relation.clone(), l.args.iter().map(|a| Term::Var(format!("x{}", a + 1))).collect());
                if l.positive {
                    atom
                } else {
                    Formula::not(atom)
                }
            })
            .collect())
    }

    /// `∀x̄ (⋀ xi ≠ xj → ¬D)`, the universal sentence forbidding the diagram.
    pub fn sentence(&self) -> Formula {
        let names = self.var_names();
        let mut distinct = Vec::new();
        for i in 0..self.vars {
            for j in i + 1..self.vars {
                distinct.push(Formula::not(Formula::eq(Term::var(&names[i]), Term::var(&names[j]))));
            }
        }
        let body = Formula::not(self.formula());
        let body = if distinct.is_empty() { body } else { Formula::implies(conj(distinct), body) };
        Formula::forall(&names, body)
    }

    /// First injective assignment in `m` satisfying every literal.
    pub fn realization(&self, m: &Structure) -> Option<Vec<usize>> {
        let mut found = None;
        for_each_injection(m.size(), self.vars, &mut |a| {
            let ok = self.literals.iter().all(|l| {
                let args: Vec<usize> = l.args.iter().map(|&v| a[v]).collect();
                m.holds(l.rel, &args) == l.positive
            });
            if ok {
                found = Some(a.to_vec());
            }
            ok
        });
        found
    }
}

fn key(l: &Literal) -> (usize, &[usize], bool) {
    (l.rel, &l.args, l.positive)
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let used = self.used();
        if used.iter().any(|u| !u) {
            write!(f, "[{}] ", self.var_names().join(","))?;
        }
        let lits: Vec<String> = self.literals.iter().map(Literal::to_string).collect();
        write!(f, "{{{}}}", lits.join(", "))
    }
}

/// Minimal forbidden diagrams on at most `bound` variables.
#[derive(Clone, Debug, Serialize)]
pub struct ForbiddenSet {
    pub bound: usize,
    pub diagrams: Vec<Diagram>,
}

impl ForbiddenSet {
    pub fn is_empty(&self) -> bool {
        self.diagrams.is_empty()
    }

    pub fn len(&self) -> usize {
        self.diagrams.len()
    }

    /// Whether `d` is one of the stored minimal diagrams, up to renaming.
    pub fn contains(&self, d: &Diagram) -> bool {
        let c = d.canonical();
        self.diagrams.contains(&c)
    }

    /// Whether `d` is forbidden, that is, extends some stored diagram.
    pub fn forbids(&self, d: &Diagram) -> bool {
        self.diagrams.iter().any(|m| embeds(m, d))
    }

    pub fn theory(&self, name: &str, sig: Arc<Signature>) -> Result<Theory> {
        Theory::new(name, sig, self.diagrams.iter().map(Diagram::sentence).collect())
    }
}

/// Whether some injective renaming of `small`'s variables into `big`'s maps
/// every literal of `small` onto a literal of `big`.
fn embeds(small: &Diagram, big: &Diagram) -> bool {
    if small.vars > big.vars {
        return false;
    }
    let mut hit = false;
    for_each_injection(big.vars, small.vars, &mut |a| {
        hit = small.literals.iter().all(|l| {
            let args: Vec<usize> = l.args.iter().map(|&v| a[v]).collect();
            big.literals.iter().any(|b| b.rel == l.rel && b.positive == l.positive && b.args == args)
        });
        hit
    });
    hit
}

/// Calls `f` on every injective map `0..k → 0..n` in lexicographic order
/// until it returns `true`.
pub(crate) fn for_each_injection(n: usize, k: usize, f: &mut dyn FnMut(&[usize]) -> bool) {
    fn go(n: usize, k: usize, cur: &mut Vec<usize>, used: &mut [bool], f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for e in 0..n {
            if !used[e] {
                used[e] = true;
                cur.push(e);
                let stop = go(n, k, cur, used, f);
                cur.pop();
                used[e] = false;
                if stop {
                    return true;
                }
            }
        }
        false
    }
    if k <= n {
        go(n, k, &mut Vec::with_capacity(k), &mut vec![false; n], f);
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_injection(k, k, &mut |p| {
        out.push(p.to_vec());
        false
    });
    out
}

/// Atom positions for diagrams over `k` variables.
struct Layout {
    k: usize,
    atoms: Vec<(usize, Vec<usize>)>,
    offsets: Vec<usize>,
}

impl Layout {
    fn new(sig: &Signature, k: usize) -> Layout {
        let mut atoms = Vec::new();
        let mut offsets = Vec::new();
        for (r, rel) in sig.relations().iter().enumerate() {
            offsets.push(atoms.len());
            for t in tuples(k, rel.arity) {
                atoms.push((r, t));
            }
        }
        Layout { k, atoms, offsets }
    }

    fn position(&self, rel: usize, args: &[usize]) -> usize {
        self.offsets[rel] + tuple_index(self.k, args)
    }
}

/// Downward-closed tables of realized diagrams, one per number of variables.
pub(crate) struct Realized {
    sig: Arc<Signature>,
    layouts: Vec<Layout>,
    tables: Vec<Vec<bool>>,
    pow3: Vec<usize>,
}

impl Realized {
    pub(crate) fn new(sig: Arc<Signature>, n: usize, limits: &Limits) -> Result<Realized> {
        if !sig.is_relational() {
            return Err(Error::Unsupported("forbidden configurations need a relational signature".into()));
        }
        if n == 0 {
            return Err(Error::Invalid("the number of variables must be positive".into()));
        }
        if n > limits.forbid_vars {
            return Err(Error::budget("forbidden-configuration variables", n, limits.forbid_vars));
        }
        let layouts: Vec<Layout> = (1..=n).map(|k| Layout::new(&sig, k)).collect();
        let atoms = layouts.last().map_or(0, |l| l.atoms.len());
        let cells = u32::try_from(atoms).ok().and_then(|a| 3u64.checked_pow(a)).filter(|&c| c <= limits.diagrams);
        let Some(_) = cells else {
            return Err(Error::budget(format!("diagrams over {n} variables"), format!("3^{atoms}"), limits.diagrams));
        };
        let pow3: Vec<usize> = std::iter::successors(Some(1usize), |p| Some(p * 3)).take(atoms + 1).collect();
        let tables = layouts.iter().map(|l| vec![false; pow3[l.atoms.len()]]).collect();
        Ok(Realized { sig, layouts, tables, pow3 })
    }

    /// Marks every complete diagram realized in `m` on `k` distinct elements.
    pub(crate) fn add(&mut self, m: &Structure, k: usize) {
        let layout = &self.layouts[k - 1];
        let table = &mut self.tables[k - 1];
        let pow3 = &self.pow3;
        for_each_injection(m.size(), k, &mut |a| {
            let mut idx = 0;
            for (i, (r, t)) in layout.atoms.iter().enumerate() {
                let args: Vec<usize> = t.iter().map(|&v| a[v]).collect();
                idx += if m.holds(*r, &args) { pow3[i] } else { 2 * pow3[i] };
            }
            table[idx] = true;
            false
        });
    }

    pub(crate) fn add_all(&mut self, m: &Structure) {
        for k in 1..=self.tables.len().min(m.size()) {
            self.add(m, k);
        }
    }

    /// Closes each table downwards: a diagram is realized when one of its
    /// one-literal extensions is.
    pub(crate) fn close(&mut self) {
        for (layout, table) in self.layouts.iter().zip(self.tables.iter_mut()) {
            for i in 0..layout.atoms.len() {
                let step = self.pow3[i];
                for block in (0..table.len()).step_by(3 * step) {
                    for j in block..block + step {
                        table[j] = table[j] || table[j + step] || table[j + 2 * step];
                    }
                }
            }
        }
    }

    fn index(&self, d: &Diagram) -> usize {
        let layout = &self.layouts[d.vars - 1];
        d.literals.iter().map(|l| self.pow3[layout.position(l.rel, &l.args)] * if l.positive { 1 } else { 2 }).sum()
    }

    pub(crate) fn realizes(&self, d: &Diagram) -> bool {
        d.vars <= self.tables.len() && self.tables[d.vars - 1][self.index(d)]
    }

    fn decode(&self, k: usize, mut idx: usize) -> Diagram {
        let layout = &self.layouts[k - 1];
        let mut literals = Vec::new();
        for (r, t) in &layout.atoms {
            let d = idx % 3;
            idx /= 3;
            if d != 0 {
                literals.push(Literal { relation: self.sig.relations()[*r].name.clone(), rel: *r, args: t.clone(), positive: d == 1 });
            }
        }
        Diagram { vars: k, literals }
    }

    /// Minimal unrealized diagrams, canonical and sorted.
    pub(crate) fn minimal_unrealized(&self) -> Vec<Diagram> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (k, table) in (1..).zip(&self.tables) {
            let atoms = self.layouts[k - 1].atoms.len();
            'next: for (idx, &realized) in table.iter().enumerate() {
                if realized {
                    continue;
                }
                let mut rest = idx;
                for i in 0..atoms {
                    let d = rest % 3;
                    rest /= 3;
                    if d != 0 && !table[idx - d * self.pow3[i]] {
                        continue 'next;
                    }
                }
                let diagram = self.decode(k, idx);
                if k > 1 {
                    let used = diagram.used();
                    for drop in (0..k).filter(|&v| !used[v]) {
                        let rename = |a: usize| if a > drop { a - 1 } else { a };
                        let smaller = Diagram {
                            vars: k - 1,
                            literals: diagram
                                .literals
                                .iter()
                                .map(|l| Literal { args: l.args.iter().map(|&a| rename(a)).collect(), ..l.clone() })
                                .collect(),
                        };
                        if !self.realizes(&smaller) {
                            continue 'next;
                        }
                    }
                }
                let c = diagram.canonical();
                let sort_key = (c.vars, c.literals.len(), c.literals.iter().map(|l| (l.rel, l.args.clone(), l.positive)).collect::<Vec<_>>());
                if seen.insert(sort_key.clone()) {
                    out.push((sort_key, c));
                }
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out.into_iter().map(|(_, d)| d).collect()
    }
}

/// Members feeding the realized tables: for a universal class the `k`-element
/// members give exactly the realized `k`-variable diagrams; otherwise every
/// member up to the search bound is used.
fn members_for(class: &ClassSpec, n: usize, limits: &Limits) -> Result<Vec<(Structure, Option<usize>)>> {
    if class.is_universal() {
        let mut out = Vec::new();
        for (k, level) in (1..=n).map(|k| class.members_of_size(k, limits).map(|l| (k, l))).collect::<Result<Vec<_>>>()? {
            out.extend(level.into_iter().map(|m| (m, Some(k))));
        }
        return Ok(out);
    }
    let bound = match class.max_member_size() {
        Some(max) => max,
        None => class.search_bound(n),
    };
    Ok(class.members_up_to(bound, limits)?.into_iter().map(|m| (m, None)).collect())
}

fn realized_of(class: &ClassSpec, n: usize, limits: &Limits) -> Result<(Realized, Vec<Structure>)> {
    let mut table = Realized::new(class.signature().clone(), n, limits)?;
    let members = members_for(class, n, limits)?;
    for (m, k) in &members {
        match k {
            Some(k) => table.add(m, *k),
            None => table.add_all(m),
        }
    }
    table.close();
    Ok((table, members.into_iter().map(|(m, _)| m).collect()))
}

/// Every minimal diagram on at most `n` variables realized by no member of `class`.
///
/// Exact for listed classes. For axiomatized classes that are not universal,
/// members are searched up to `class.search_bound(n)` elements, so the
/// result is relative to that bound.
pub fn forbidden_configurations(class: &ClassSpec, n: usize, limits: &Limits) -> Result<ForbiddenSet> {
    let (table, _) = realized_of(class, n, limits)?;
    Ok(ForbiddenSet { bound: n, diagrams: table.minimal_unrealized() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Falsifiability {
    Falsifiable { witness: Diagram },
    /// Nothing is forbidden at this scale; not a proof of unfalsifiability.
    NotFalsifiableAtScale,
}

impl Falsifiability {
    pub fn is_falsifiable(&self) -> bool {
        matches!(self, Falsifiability::Falsifiable { .. })
    }
}

pub fn falsifiable_at(class: &ClassSpec, n: usize, limits: &Limits) -> Result<Falsifiability> {
    let set = forbidden_configurations(class, n, limits)?;
    Ok(match set.diagrams.into_iter().next() {
        Some(witness) => Falsifiability::Falsifiable { witness },
        None => Falsifiability::NotFalsifiableAtScale,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelativeVerdict {
    pub relatively_falsifiable: bool,
    /// A minimal diagram forbidden in the subclass but realized in the superclass.
    pub witness: Option<Diagram>,
}

/// Whether `sub` forbids strictly more than `sup` on at most `n` variables.
/// Fails with [`Error::NotASubclass`] when a searched member of `sub` is not in `sup`.
pub fn relative_falsifiability_at(sub: &ClassSpec, sup: &ClassSpec, n: usize, limits: &Limits) -> Result<RelativeVerdict> {
    sub.signature().ensure_same(sup.signature())?;
    let (small, members) = realized_of(sub, n, limits)?;
    for m in &members {
        if !sup.contains(m)? {
            return Err(Error::NotASubclass(format!("{} has a member outside {}:\n{}", sub.name, sup.name, m.to_text("witness"))));
        }
    }
    let (big, _) = realized_of(sup, n, limits)?;
    let witness = small.minimal_unrealized().into_iter().find(|d| big.realizes(d));
    Ok(RelativeVerdict { relatively_falsifiable: witness.is_some(), witness })
}
