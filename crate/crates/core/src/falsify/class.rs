//! Classes of finite structures, given by axioms or by listing members.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::logic::{Compiled, Theory, UniversalSentence};
use crate::sigstruct::text::{parse_signature, parse_structure};
use crate::sigstruct::{canonical_form, enumerate_structures, tuples, IsoClassId, Signature, Structure};

#[derive(Clone, Debug)]
pub enum ClassKind {
    /// The finite models of a theory.
    Intensional(Theory),
    /// Members listed up to isomorphism, keyed by canonical id.
    Extensional(BTreeMap<IsoClassId, Structure>),
}

/// A class `K` of finite structures over one signature.
#[derive(Clone, Debug)]
pub struct ClassSpec {
    pub name: String,
    sig: Arc<Signature>,
    kind: ClassKind,
    /// Largest domain searched for members when the class is not universal.
    pub cap: Option<usize>,
}

enum Check {
    Universal(UniversalSentence),
    General(Compiled),
}

impl ClassSpec {
    pub fn intensional(theory: Theory) -> ClassSpec {
        ClassSpec { name: theory.name.clone(), sig: theory.sig.clone(), kind: ClassKind::Intensional(theory), cap: None }
    }

    /// Stores each member by its canonical representative; isomorphic copies collapse.
    pub fn extensional(name: &str, sig: Arc<Signature>, members: impl IntoIterator<Item = Structure>) -> Result<ClassSpec> {
        let limits = Limits::default();
        let mut reps = BTreeMap::new();
        for m in members {
            sig.ensure_same(m.signature())?;
            let form = canonical_form(&m, &limits)?;
            reps.entry(form.id.clone()).or_insert_with(|| form.apply(&m));
        }
        Ok(ClassSpec { name: name.to_string(), sig, kind: ClassKind::Extensional(reps), cap: None })
    }

    pub fn with_cap(mut self, cap: usize) -> ClassSpec {
        self.cap = Some(cap);
        self
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn kind(&self) -> &ClassKind {
        &self.kind
    }

    pub fn theory(&self) -> Option<&Theory> {
        match &self.kind {
            ClassKind::Intensional(t) => Some(t),
            ClassKind::Extensional(_) => None,
        }
    }

    /// Intensional with every axiom universal; such classes are closed under substructures.
    pub fn is_universal(&self) -> bool {
        match &self.kind {
            ClassKind::Intensional(t) => t.sentences.iter().all(|s| UniversalSentence::new(s, &self.sig).is_ok()),
            ClassKind::Extensional(_) => false,
        }
    }

    /// Domain bound used when members of every size up to it are needed.
    pub fn search_bound(&self, n: usize) -> usize {
        self.cap.unwrap_or((n + 2).max(5))
    }

    /// Largest listed member, for extensional classes.
    pub fn max_member_size(&self) -> Option<usize> {
        match &self.kind {
            ClassKind::Extensional(reps) => Some(reps.values().map(Structure::size).max().unwrap_or(0)),
            ClassKind::Intensional(_) => None,
        }
    }

    pub fn contains(&self, m: &Structure) -> Result<bool> {
        self.sig.ensure_same(m.signature())?;
        match &self.kind {
            ClassKind::Intensional(t) => t.is_model(m),
            ClassKind::Extensional(reps) => {
                if !reps.values().any(|r| r.size() == m.size()) {
                    return Ok(false);
                }
                Ok(reps.contains_key(&canonical_form(m, &Limits { canon_size: usize::MAX, ..Limits::default() })?.id))
            }
        }
    }

    fn checks(&self, t: &Theory) -> Result<Vec<Check>> {
        t.sentences
            .iter()
            .map(|s| match UniversalSentence::new(s, &self.sig) {
                Ok(u) => Ok(Check::Universal(u)),
                Err(_) => Compiled::new(s, &self.sig).map(Check::General),
            })
            .collect()
    }

    /// Members of size exactly `k`, one per isomorphism class, in id order.
    pub fn members_of_size(&self, k: usize, limits: &Limits) -> Result<Vec<Structure>> {
        Ok(self.levels(k, limits)?.pop().unwrap_or_default())
    }

    /// Members of size `1..=n`, one per isomorphism class, by size then id.
    pub fn members_up_to(&self, n: usize, limits: &Limits) -> Result<Vec<Structure>> {
        Ok(self.levels(n, limits)?.into_iter().flatten().collect())
    }

    fn levels(&self, n: usize, limits: &Limits) -> Result<Vec<Vec<Structure>>> {
        let theory = match &self.kind {
            ClassKind::Extensional(reps) => {
                let mut out = vec![Vec::new(); n];
                for m in reps.values() {
                    if (1..=n).contains(&m.size()) {
                        out[m.size() - 1].push(m.clone());
                    }
                }
                return Ok(out);
            }
            ClassKind::Intensional(t) => t,
        };
        let checks = self.checks(theory)?;
        let hereditary = checks.iter().all(|c| matches!(c, Check::Universal(_)));
        let mut out: Vec<Vec<Structure>> = Vec::new();
        for k in 1..=n {
            let level = if hereditary && self.sig.is_relational() && k > 1 {
                self.extend(&out[k - 2], k, &checks, limits)?
            } else {
                self.brute(k, &checks, limits)?
            };
            out.push(level);
        }
        Ok(out)
    }

    fn brute(&self, k: usize, checks: &[Check], limits: &Limits) -> Result<Vec<Structure>> {
        let mut found = BTreeMap::new();
        for m in enumerate_structures(&self.sig, k, limits)? {
            let ok = checks.iter().all(|c| match c {
                Check::Universal(u) => u.holds(&m),
                Check::General(g) => g.eval(&m, &[]),
            });
            if ok {
                let form = canonical_form(&m, limits)?;
                found.entry(form.id.clone()).or_insert_with(|| form.apply(&m));
            }
        }
        Ok(found.into_values().collect())
    }

    /// Every `k`-element member of a universal relational class restricts to a
    /// `(k-1)`-element member, so it is isomorphic to a one-point extension of
    /// some smaller representative. Only instances touching the new point are
    /// checked.
    fn extend(&self, smaller: &[Structure], k: usize, checks: &[Check], limits: &Limits) -> Result<Vec<Structure>> {
        let new = k - 1;
        let mut cells = Vec::new();
        for (r, rel) in self.sig.relations().iter().enumerate() {
            for t in tuples(k, rel.arity) {
                if t.contains(&new) {
                    cells.push((r, t));
                }
            }
        }
        if cells.len() >= 63 {
            return Err(Error::budget(format!("extending to {k} elements"), format!("2^{}", cells.len()), limits.enumeration));
        }
        let per = 1u64 << cells.len();
        let needed = per.saturating_mul(smaller.len() as u64);
        if needed > limits.enumeration {
            return Err(Error::budget(format!("extending to {k} elements"), needed, limits.enumeration));
        }
        let mut touch = vec![false; k];
        touch[new] = true;
        let mut found = BTreeMap::new();
        for s in smaller {
            let mut m = Structure::with_size(self.sig.clone(), k)?;
            for r in 0..self.sig.relations().len() {
                for t in s.relation_tuples(r) {
                    m.set(r, &t, true);
                }
            }
            for mask in 0..per {
                for (i, (r, t)) in cells.iter().enumerate() {
                    m.set(*r, t, mask >> i & 1 == 1);
                }
                let ok = checks.iter().all(|c| match c {
                    Check::Universal(u) => u.counterexample(&m, Some(&touch)).is_none(),
                    Check::General(g) => g.eval(&m, &[]),
                });
                if ok {
                    let form = canonical_form(&m, limits)?;
                    if !found.contains_key(&form.id) {
                        let rep = form.apply(&m);
                        found.insert(form.id, rep);
                    }
                }
            }
        }
        Ok(found.into_values().collect())
    }

    /// Reads a class file:
    ///
    /// ```text
    /// class acyclic
    /// sig digraph { rel edge/2 }
    /// cap 5
    /// axiom forall x. !edge(x,x)
    /// theory other.fot
    /// structure m over digraph { dom = {a,b}; edge = {(a,b)} }
    /// ```
    ///
    /// Axioms and `theory` lines make the class intensional, `structure`
    /// blocks make it extensional; mixing the two is an error. Paths are
    /// resolved against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<ClassSpec> {
        let mut name = String::from("K");
        let mut sig: Option<Signature> = None;
        let mut cap = None;
        let mut axioms: Vec<String> = Vec::new();
        let mut theories: Vec<Theory> = Vec::new();
        let mut blocks: Vec<String> = Vec::new();
        let mut lines = text.lines().enumerate();
        while let Some((i, raw)) = lines.next() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            let bad = |msg: &str| Error::Invalid(format!("class file line {}: {msg}", i + 1));
            match head {
                "class" => name = rest.to_string(),
                "sig" => {
                    if sig.is_some() {
                        return Err(bad("second signature"));
                    }
                    sig = Some(parse_signature(line)?);
                }
                "cap" => cap = Some(rest.parse::<usize>().map_err(|_| bad("`cap` needs a number"))?),
                "axiom" => axioms.push(rest.to_string()),
                "theory" => {
                    let path = base.map(|b| b.join(rest)).unwrap_or_else(|| rest.into());
                    theories.push(Theory::load(&path)?);
                }
                "structure" => {
                    let mut block = line.to_string();
                    let mut depth = brace_depth(line);
                    while depth > 0 {
                        let (_, more) = lines.next().ok_or_else(|| bad("unterminated structure"))?;
                        let more = more.split('#').next().unwrap_or("");
                        depth += brace_depth(more);
                        block.push('\n');
                        block.push_str(more);
                    }
                    blocks.push(block);
                }
                _ => return Err(bad(&format!("unknown directive `{head}`"))),
            }
        }
        let intensional = !axioms.is_empty() || !theories.is_empty();
        if intensional && !blocks.is_empty() {
            return Err(Error::Invalid("a class is either axiomatized or listed, not both".into()));
        }
        let mut spec = if !blocks.is_empty() {
            let sig = Arc::new(sig.ok_or_else(|| Error::Invalid("listed classes need a `sig` line".into()))?);
            let mut members = Vec::new();
            for b in &blocks {
                members.push(parse_structure(b, std::slice::from_ref(&sig))?.1);
            }
            ClassSpec::extensional(&name, sig, members)?
        } else {
            let mut src = String::new();
            if let Some(s) = &sig {
                src.push_str(&format!("{s}\n"));
            } else if let Some(t) = theories.first() {
                src.push_str(&format!("{}\n", t.sig));
            }
            for a in &axioms {
                src.push_str(a);
                src.push('\n');
            }
            let own = Theory::parse(&name, &src)?;
            let mut sentences = own.sentences.clone();
            for t in &theories {
                own.sig.ensure_same(&t.sig)?;
                sentences.extend(t.sentences.iter().cloned());
            }
            ClassSpec::intensional(Theory::new(&name, own.sig.clone(), sentences)?)
        };
        spec.cap = cap;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<ClassSpec> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
        ClassSpec::parse(&text, path.parent())
    }
}

fn brace_depth(s: &str) -> i64 {
    s.chars().map(|c| match c {
        '{' => 1,
        '}' => -1,
        _ => 0,
    }).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dags() -> ClassSpec {
        ClassSpec::parse(
            "class dag\nsig g { rel edge/2 }\naxiom forall x. !edge(x,x)\naxiom forall x,y. !(edge(x,y) & edge(y,x))\naxiom forall x,y,z. !(edge(x,y) & edge(y,z) & edge(z,x))\naxiom forall x,y,z,w. !(edge(x,y) & edge(y,z) & edge(z,w) & edge(w,x))",
            None,
        )
        .unwrap()
    }

    #[test]
    fn unlabeled_dag_counts() {
        // unlabeled acyclic digraphs on 1..4 nodes: 1, 2, 6, 31
        let k = dags();
        assert!(k.is_universal());
        let counts: Vec<usize> = (1..=4).map(|n| k.members_of_size(n, &Limits::default()).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 2, 6, 31]);
    }

    #[test]
    fn extension_agrees_with_brute_force() {
        let k = dags();
        let theory = k.theory().unwrap();
        let checks = k.checks(theory).unwrap();
        let limits = Limits::default();
        let small = k.members_of_size(3, &limits).unwrap();
        let ext = k.extend(&small, 4, &checks, &limits).unwrap();
        let brute = k.brute(4, &checks, &limits).unwrap();
        let ids = |v: &[Structure]| v.iter().map(|m| canonical_form(m, &limits).unwrap().id).collect::<Vec<_>>();
        assert_eq!(ids(&ext), ids(&brute));
    }

    #[test]
    fn listed_classes_collapse_isomorphic_copies() {
        let src = "class two\nsig g { rel edge/2 }\nstructure a over g { dom = {p,q}; edge = {(p,q)} }\nstructure b over g {\n dom = {p,q};\n edge = {(q,p)}\n}\n";
        let k = ClassSpec::parse(src, None).unwrap();
        match k.kind() {
            ClassKind::Extensional(reps) => assert_eq!(reps.len(), 1),
            _ => panic!("expected a listed class"),
        }
        assert_eq!(k.max_member_size(), Some(2));
    }

    #[test]
    fn mixing_axioms_and_members_is_rejected() {
        let src = "sig g { rel edge/2 }\naxiom forall x. !edge(x,x)\nstructure a over g { dom = {p}; edge = {} }\n";
        assert!(ClassSpec::parse(src, None).is_err());
    }
}
