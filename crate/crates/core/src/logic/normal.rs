//! Normal forms and syntactic classification.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

use super::ast::{conj, disj, fresh_name, Formula, Quantifier, Term};

/// Deletes double negations and quantified variables that do not occur free
/// in the body.
pub fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::Not(g) => match simplify(g) {
            Formula::Not(h) => *h,
            h => Formula::not(h),
        },
        Formula::And(fs) => Formula::And(fs.iter().map(simplify).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(simplify).collect()),
        Formula::Implies(a, b) => Formula::implies(simplify(a), simplify(b)),
        Formula::Iff(a, b) => Formula::iff(simplify(a), simplify(b)),
        Formula::Quant(q, vs, body) => {
            let body = simplify(body);
            let free = body.free_vars();
            let mut kept: Vec<String> = Vec::new();
            for v in vs {
                if free.contains(v) && !kept.contains(v) {
                    kept.push(v.clone());
                }
            }
            if kept.is_empty() {
                body
            } else {
                Formula::Quant(*q, kept, Box::new(body))
            }
        }
        _ => f.clone(),
    }
}

/// Negation normal form: no `->` or `<->`, negations only on atoms.
pub fn nnf(f: &Formula) -> Formula {
    to_nnf(f, true)
}

fn to_nnf(f: &Formula, pos: bool) -> Formula {
    match f {
        Formula::True => {
            if pos {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::False => {
            if pos {
                Formula::False
            } else {
                Formula::True
            }
        }
        Formula::Rel(..) | Formula::Eq(..) => {
            if pos {
                f.clone()
            } else {
                Formula::not(f.clone())
            }
        }
        Formula::Not(g) => to_nnf(g, !pos),
        Formula::And(fs) | Formula::Or(fs) => {
            let parts = fs.iter().map(|g| to_nnf(g, pos)).collect();
            if matches!(f, Formula::And(_)) == pos {
                Formula::And(parts)
            } else {
                Formula::Or(parts)
            }
        }
        Formula::Implies(a, b) => {
            if pos {
                Formula::Or(vec![to_nnf(a, false), to_nnf(b, true)])
            } else {
                Formula::And(vec![to_nnf(a, true), to_nnf(b, false)])
            }
        }
        Formula::Iff(a, b) => {
            if pos {
                Formula::And(vec![
                    Formula::Or(vec![to_nnf(a, false), to_nnf(b, true)]),
                    Formula::Or(vec![to_nnf(a, true), to_nnf(b, false)]),
                ])
            } else {
                Formula::Or(vec![
                    Formula::And(vec![to_nnf(a, true), to_nnf(b, false)]),
                    Formula::And(vec![to_nnf(a, false), to_nnf(b, true)]),
                ])
            }
        }
        Formula::Quant(q, vs, body) => {
            let q = if pos { *q } else { q.dual() };
            Formula::Quant(q, vs.clone(), Box::new(to_nnf(body, pos)))
        }
    }
}

/// Renames binders so that every bound variable is bound exactly once and
/// differs from every free variable.
pub fn rename_apart(f: &Formula) -> Formula {
    let mut taken: BTreeSet<String> = f.all_vars();
    taken.extend(f.symbols().2);
    let mut seen: BTreeSet<String> = f.free_vars().into_iter().collect();
    apart(f, &mut taken, &mut seen)
}

fn apart(f: &Formula, taken: &mut BTreeSet<String>, seen: &mut BTreeSet<String>) -> Formula {
    match f {
        Formula::Not(g) => Formula::not(apart(g, taken, seen)),
        Formula::And(fs) => Formula::And(fs.iter().map(|g| apart(g, taken, seen)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| apart(g, taken, seen)).collect()),
        Formula::Implies(a, b) => {
            let a = apart(a, taken, seen);
            Formula::implies(a, apart(b, taken, seen))
        }
        Formula::Iff(a, b) => {
            let a = apart(a, taken, seen);
            Formula::iff(a, apart(b, taken, seen))
        }
        Formula::Quant(q, vs, body) => {
            let mut body = (**body).clone();
            let mut names = Vec::new();
            for v in vs {
                if seen.contains(v) || names.contains(v) {
                    let fresh = fresh_name(v, taken);
                    taken.insert(fresh.clone());
                    body = body.substitute(v, &Term::Var(fresh.clone()));
                    names.push(fresh);
                } else {
                    names.push(v.clone());
                }
            }
            seen.extend(names.iter().cloned());
            Formula::Quant(*q, names, Box::new(apart(&body, taken, seen)))
        }
        _ => f.clone(),
    }
}

/// Pushes quantifiers inward over an NNF formula: `∀` distributes over `∧`,
/// `∀` over `∨` splits into components that share bound variables, and dually
/// for `∃`. The result is equivalent and usually much cheaper to evaluate.
pub fn miniscope(f: &Formula) -> Formula {
    match f {
        Formula::And(fs) => flatten(true, fs.iter().map(miniscope).collect()),
        Formula::Or(fs) => flatten(false, fs.iter().map(miniscope).collect()),
        Formula::Not(g) => Formula::not(miniscope(g)),
        Formula::Quant(q, vs, body) => push(*q, vs, miniscope(body)),
        _ => f.clone(),
    }
}

fn flatten(and: bool, parts: Vec<Formula>) -> Formula {
    let mut out = Vec::new();
    for p in parts {
        match p {
            Formula::And(inner) if and => out.extend(inner),
            Formula::Or(inner) if !and => out.extend(inner),
            other => out.push(other),
        }
    }
    if and {
        conj(out)
    } else {
        disj(out)
    }
}

fn push(q: Quantifier, vs: &[String], f: Formula) -> Formula {
    let free = f.free_vars();
    let vs: Vec<String> = vs.iter().filter(|v| free.contains(v)).cloned().collect();
    if vs.is_empty() {
        return f;
    }
    // the connective the quantifier distributes over, and the one it splits
    let (dist_and, parts) = match (&q, f) {
        (Quantifier::Forall, Formula::And(parts)) => (true, Ok(parts)),
        (Quantifier::Exists, Formula::Or(parts)) => (false, Ok(parts)),
        (Quantifier::Forall, Formula::Or(parts)) => (false, Err(parts)),
        (Quantifier::Exists, Formula::And(parts)) => (true, Err(parts)),
        (_, Formula::Quant(q2, ws, body)) if q2 == q => {
            let mut all = vs.clone();
            all.extend(ws);
            return push(q, &all, *body);
        }
        (_, other) => return Formula::Quant(q, vs, Box::new(other)),
    };
    match parts {
        Ok(parts) => flatten(dist_and, parts.into_iter().map(|p| push(q, &vs, p)).collect()),
        Err(parts) => {
            let and = dist_and;
            let frees: Vec<Vec<String>> = parts.iter().map(|p| p.free_vars()).collect();
            let mut outside = Vec::new();
            let mut comp: Vec<usize> = (0..parts.len()).collect();
            fn find(c: &mut [usize], x: usize) -> usize {
                let mut r = x;
                while c[r] != r {
                    r = c[r];
                }
                c[x] = r;
                r
            }
            for v in &vs {
                let holders: Vec<usize> = (0..parts.len()).filter(|&i| frees[i].contains(v)).collect();
                for w in holders.windows(2) {
                    let (a, b) = (find(&mut comp, w[0]), find(&mut comp, w[1]));
                    comp[a] = b;
                }
            }
            let mut groups: Vec<(usize, Vec<Formula>, Vec<String>)> = Vec::new();
            for (i, p) in parts.into_iter().enumerate() {
                let mine: Vec<String> = vs.iter().filter(|v| frees[i].contains(v)).cloned().collect();
                if mine.is_empty() {
                    outside.push(p);
                    continue;
                }
                let root = find(&mut comp, i);
                match groups.iter_mut().find(|(r, _, _)| *r == root) {
                    Some((_, ps, gv)) => {
                        ps.push(p);
                        for v in mine {
                            if !gv.contains(&v) {
                                gv.push(v);
                            }
                        }
                    }
                    None => groups.push((root, vec![p], mine)),
                }
            }
            if groups.len() == 1 && outside.is_empty() {
                let (_, ps, gv) = groups.pop().unwrap();
                let ordered: Vec<String> = vs.iter().filter(|v| gv.contains(v)).cloned().collect();
                let body = if and { conj(ps) } else { disj(ps) };
                if ordered.len() == 1 {
                    return Formula::Quant(q, ordered, Box::new(body));
                }
                // keep the most widely shared variable outside and retry with the rest
                let count = |v: &String| frees.iter().filter(|fv| fv.contains(v)).count();
                let pivot = ordered.iter().max_by_key(|v| (count(v), std::cmp::Reverse(vs.iter().position(|w| w == *v)))).unwrap().clone();
                let rest: Vec<String> = ordered.into_iter().filter(|v| *v != pivot).collect();
                return Formula::Quant(q, vec![pivot], Box::new(push(q, &rest, body)));
            }
            for (_, ps, gv) in groups {
                let ordered: Vec<String> = vs.iter().filter(|v| gv.contains(v)).cloned().collect();
                outside.push(push(q, &ordered, if and { conj(ps) } else { disj(ps) }));
            }
            flatten(and, outside)
        }
    }
}

/// The quantifier-prefix class of a prenex formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PrenexLevel {
    /// Number of quantifier blocks.
    pub blocks: usize,
    /// Type of the outermost block; `None` when quantifier-free.
    pub first: Option<Quantifier>,
}

impl Serialize for Quantifier {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.keyword())
    }
}

impl PrenexLevel {
    /// `Π_n` for a leading universal block, `Σ_n` for a leading existential one.
    pub fn is_pi(&self, n: usize) -> bool {
        match self.first {
            None => true,
            Some(Quantifier::Forall) => self.blocks <= n,
            Some(Quantifier::Exists) => self.blocks < n,
        }
    }

    pub fn is_sigma(&self, n: usize) -> bool {
        match self.first {
            None => true,
            Some(Quantifier::Exists) => self.blocks <= n,
            Some(Quantifier::Forall) => self.blocks < n,
        }
    }
}

impl fmt::Display for PrenexLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.first {
            None => f.write_str("QF"),
            Some(Quantifier::Forall) => write!(f, "Pi{}", self.blocks),
            Some(Quantifier::Exists) => write!(f, "Sigma{}", self.blocks),
        }
    }
}

fn as_prenex(f: &Formula) -> Option<(Vec<(Quantifier, Vec<String>)>, &Formula)> {
    let mut prefix = Vec::new();
    let mut cur = f;
    while let Formula::Quant(q, vs, body) = cur {
        prefix.push((*q, vs.clone()));
        cur = body;
    }
    cur.is_quantifier_free().then_some((prefix, cur))
}

fn level_of(prefix: &[(Quantifier, Vec<String>)]) -> PrenexLevel {
    let mut blocks = 0;
    let mut last = None;
    for (q, vs) in prefix {
        if vs.is_empty() {
            continue;
        }
        if last != Some(*q) {
            blocks += 1;
            last = Some(*q);
        }
    }
    PrenexLevel { blocks, first: prefix.iter().find(|(_, vs)| !vs.is_empty()).map(|(q, _)| *q) }
}

/// An equivalent prenex formula whose prefix has as few alternations as the
/// quantifier nesting allows, preferring a universal first block on ties.
/// Formulas that are already prenex are returned unchanged.
pub fn to_prenex(f: &Formula) -> Formula {
    if as_prenex(f).is_some() {
        return f.clone();
    }
    let g = rename_apart(&nnf(f));
    let costs = Costs::of(&g);
    let start = if costs.get(Quantifier::Forall) <= costs.get(Quantifier::Exists) {
        Quantifier::Forall
    } else {
        Quantifier::Exists
    };
    let mut blocks: Vec<Vec<String>> = Vec::new();
    assign(&g, start, 0, &mut blocks);
    let matrix = strip(&g);
    let mut out = matrix;
    for (i, vs) in blocks.iter().enumerate().rev() {
        if vs.is_empty() {
            continue;
        }
        let q = if i % 2 == 0 { start } else { start.dual() };
        out = Formula::Quant(q, vs.clone(), Box::new(out));
    }
    out
}

/// Prefix class of the formula after prenex conversion.
pub fn prenex_level(f: &Formula) -> PrenexLevel {
    let p = to_prenex(f);
    let (prefix, _) = as_prenex(&p).expect("prenex output");
    level_of(&prefix)
}

#[derive(Clone, Copy)]
struct Costs {
    forall: usize,
    exists: usize,
}

impl Costs {
    fn get(&self, q: Quantifier) -> usize {
        match q {
            Quantifier::Forall => self.forall,
            Quantifier::Exists => self.exists,
        }
    }

    /// Blocks needed when the sequence must be read as starting with `q`.
    fn aligned(&self, q: Quantifier) -> usize {
        let own = self.get(q);
        let other = self.get(q.dual());
        if other == 0 {
            0
        } else {
            own.min(other + 1)
        }
    }

    fn of(f: &Formula) -> Costs {
        match f {
            Formula::And(fs) | Formula::Or(fs) => {
                let cs: Vec<Costs> = fs.iter().map(Costs::of).collect();
                Costs {
                    forall: cs.iter().map(|c| c.aligned(Quantifier::Forall)).max().unwrap_or(0),
                    exists: cs.iter().map(|c| c.aligned(Quantifier::Exists)).max().unwrap_or(0),
                }
            }
            Formula::Quant(q, _, body) => {
                let b = Costs::of(body);
                let same = b.aligned(*q).max(1);
                match q {
                    Quantifier::Forall => Costs { forall: same, exists: same + 1 },
                    Quantifier::Exists => Costs { exists: same, forall: same + 1 },
                }
            }
            _ => Costs { forall: 0, exists: 0 },
        }
    }
}

fn assign(f: &Formula, q: Quantifier, offset: usize, blocks: &mut Vec<Vec<String>>) {
    let child = |c: &Formula, blocks: &mut Vec<Vec<String>>| {
        let costs = Costs::of(c);
        if costs.get(q) <= costs.get(q.dual()) + 1 {
            assign(c, q, offset, blocks);
        } else {
            assign(c, q.dual(), offset + 1, blocks);
        }
    };
    match f {
        Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|c| child(c, blocks)),
        Formula::Quant(kind, vs, body) => {
            if *kind != q {
                return assign(f, kind.to_owned(), offset + 1, blocks);
            }
            if blocks.len() <= offset {
                blocks.resize(offset + 1, Vec::new());
            }
            blocks[offset].extend(vs.iter().cloned());
            child(body, blocks);
        }
        _ => {}
    }
}

fn strip(f: &Formula) -> Formula {
    match f {
        Formula::And(fs) => Formula::And(fs.iter().map(strip).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(strip).collect()),
        Formula::Quant(_, _, body) => strip(body),
        _ => f.clone(),
    }
}

/// Syntactic class flags of a sentence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SyntaxClass {
    pub quantifier_free: bool,
    pub universal: bool,
    pub existential: bool,
    pub uncaf: bool,
    pub prenex: PrenexLevel,
}

/// Classifies a sentence after [`simplify`]. `universal` means every `∀`
/// occurs positively and every `∃` negatively (so the prenex form is `∀*`);
/// `uncaf` means the shape `∀x̄ ¬(A₁ ∧ … ∧ A_k)` with atomic `A_i`, equality
/// atoms included.
pub fn classify_syntax(f: &Formula) -> Result<SyntaxClass> {
    if let Some(v) = f.free_vars().first() {
        return Err(Error::OpenFormula(v.clone()));
    }
    let g = simplify(f);
    let mut polarity = Polarity::default();
    polarity.scan(&g, true);
    let quantifier_free = g.is_quantifier_free();
    Ok(SyntaxClass {
        quantifier_free,
        universal: !polarity.exists_like,
        existential: !polarity.forall_like,
        uncaf: is_uncaf(&g),
        prenex: prenex_level(&g),
    })
}

#[derive(Default)]
struct Polarity {
    forall_like: bool,
    exists_like: bool,
}

impl Polarity {
    fn mark(&mut self, q: Quantifier, pos: Option<bool>) {
        let effective = |p: bool| if p { q } else { q.dual() };
        match pos {
            Some(p) => match effective(p) {
                Quantifier::Forall => self.forall_like = true,
                Quantifier::Exists => self.exists_like = true,
            },
            None => {
                self.forall_like = true;
                self.exists_like = true;
            }
        }
    }

    /// `pos = None` marks positions under `<->`, which have both polarities.
    fn scan_opt(&mut self, f: &Formula, pos: Option<bool>) {
        match f {
            Formula::Not(g) => self.scan_opt(g, pos.map(|p| !p)),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| self.scan_opt(g, pos)),
            Formula::Implies(a, b) => {
                self.scan_opt(a, pos.map(|p| !p));
                self.scan_opt(b, pos);
            }
            Formula::Iff(a, b) => {
                self.scan_opt(a, None);
                self.scan_opt(b, None);
            }
            Formula::Quant(q, _, body) => {
                self.mark(*q, pos);
                self.scan_opt(body, pos);
            }
            _ => {}
        }
    }

    fn scan(&mut self, f: &Formula, pos: bool) {
        self.scan_opt(f, Some(pos));
    }
}

fn is_atom(f: &Formula) -> bool {
    matches!(f, Formula::Rel(..) | Formula::Eq(..))
}

fn is_uncaf(f: &Formula) -> bool {
    let mut cur = f;
    while let Formula::Quant(Quantifier::Forall, _, body) = cur {
        cur = body;
    }
    match cur {
        Formula::Not(inner) => match &**inner {
            Formula::And(parts) => !parts.is_empty() && parts.iter().all(is_atom),
            g => is_atom(g),
        },
        _ => false,
    }
}
