//! Evaluation over finite structures.
//!
//! Formulas are compiled against a signature: symbols become table indices and
//! variables become slots. Before compiling, the formula is put in negation
//! normal form, renamed apart and miniscoped, which keeps sentences with many
//! quantified variables (such as `VC_n`) cheap to check.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::sigstruct::{Signature, Structure, SymbolKind};

use super::ast::{Formula, Quantifier, Term};
use super::normal::{miniscope, nnf, rename_apart, to_prenex};

/// A partial assignment of domain elements to variable names.
pub type Assignment = BTreeMap<String, usize>;

#[derive(Clone, Debug)]
pub(crate) enum CTerm {
    Var(usize),
    Const(usize),
    App(usize, Vec<CTerm>),
}

#[derive(Clone, Debug)]
pub(crate) enum Node {
    Bool(bool),
    Rel(usize, Vec<CTerm>),
    Eq(CTerm, CTerm),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
    Quant(Quantifier, Vec<usize>, Box<Node>),
}

/// A formula compiled for repeated evaluation over structures of one signature.
#[derive(Clone, Debug)]
pub struct Compiled {
    pub(crate) root: Node,
    pub(crate) slots: usize,
    free: Vec<String>,
}

struct Compiler<'a> {
    sig: &'a Signature,
    names: Vec<String>,
}

impl Compiler<'_> {
    fn slot(&mut self, v: &str) -> usize {
        match self.names.iter().position(|n| n == v) {
            Some(i) => i,
            None => {
                self.names.push(v.to_string());
                self.names.len() - 1
            }
        }
    }

    fn term(&mut self, t: &Term) -> Result<CTerm> {
        Ok(match t {
            Term::Var(v) => CTerm::Var(self.slot(v)),
            Term::Const(c) => match self.sig.lookup(c) {
                Some(SymbolKind::Constant(i)) => CTerm::Const(i),
                _ => return Err(Error::SignatureMismatch(format!("`{c}` is not a constant of `{}`", self.sig.name))),
            },
            Term::App(f, args) => match self.sig.lookup(f) {
                Some(SymbolKind::Function(i)) => {
                    let expected = self.sig.functions()[i].arity;
                    if expected != args.len() {
                        return Err(Error::Arity { symbol: f.clone(), expected, got: args.len() });
                    }
                    CTerm::App(i, args.iter().map(|a| self.term(a)).collect::<Result<_>>()?)
                }
                _ => return Err(Error::SignatureMismatch(format!("`{f}` is not a function of `{}`", self.sig.name))),
            },
        })
    }

    fn node(&mut self, f: &Formula) -> Result<Node> {
        Ok(match f {
            Formula::True => Node::Bool(true),
            Formula::False => Node::Bool(false),
            Formula::Rel(r, args) => match self.sig.lookup(r) {
                Some(SymbolKind::Relation(i)) => {
                    let expected = self.sig.relations()[i].arity;
                    if expected != args.len() {
                        return Err(Error::Arity { symbol: r.clone(), expected, got: args.len() });
                    }
                    Node::Rel(i, args.iter().map(|a| self.term(a)).collect::<Result<_>>()?)
                }
                _ => return Err(Error::SignatureMismatch(format!("`{r}` is not a relation of `{}`", self.sig.name))),
            },
            Formula::Eq(a, b) => Node::Eq(self.term(a)?, self.term(b)?),
            Formula::Not(g) => Node::Not(Box::new(self.node(g)?)),
            Formula::And(fs) => Node::And(fs.iter().map(|g| self.node(g)).collect::<Result<_>>()?),
            Formula::Or(fs) => Node::Or(fs.iter().map(|g| self.node(g)).collect::<Result<_>>()?),
            Formula::Implies(a, b) => Node::Or(vec![Node::Not(Box::new(self.node(a)?)), self.node(b)?]),
            Formula::Iff(a, b) => {
                let (a, b) = (self.node(a)?, self.node(b)?);
                Node::Or(vec![
                    Node::And(vec![a.clone(), b.clone()]),
                    Node::And(vec![Node::Not(Box::new(a)), Node::Not(Box::new(b))]),
                ])
            }
            Formula::Quant(q, vs, body) => {
                let slots = vs.iter().map(|v| self.slot(v)).collect();
                Node::Quant(*q, slots, Box::new(self.node(body)?))
            }
        })
    }
}

impl Compiled {
    /// Compiles `f` with its free variables in the slots `0..free.len()`, in
    /// the order given by `free` (which must list every free variable).
    pub fn with_free(f: &Formula, sig: &Signature, free: &[String]) -> Result<Compiled> {
        for v in f.free_vars() {
            if !free.contains(&v) {
                return Err(Error::UnboundVariable(v));
            }
        }
        let prepared = miniscope(&rename_apart(&nnf(f)));
        let mut c = Compiler { sig, names: free.to_vec() };
        let root = c.node(&prepared)?;
        Ok(Compiled { root, slots: c.names.len(), free: free.to_vec() })
    }

    pub fn new(f: &Formula, sig: &Signature) -> Result<Compiled> {
        Self::with_free(f, sig, &f.free_vars())
    }

    pub fn free_vars(&self) -> &[String] {
        &self.free
    }

    /// Evaluates with the free variables bound to `args` in slot order.
    pub fn eval(&self, m: &Structure, args: &[usize]) -> bool {
        let mut env = vec![0; self.slots.max(1)];
        env[..args.len()].copy_from_slice(args);
        eval_node(&self.root, m, &mut env)
    }

    /// Evaluates reusing a caller-provided environment of at least `slots()` entries.
    pub fn eval_in(&self, m: &Structure, env: &mut [usize]) -> bool {
        eval_node(&self.root, m, env)
    }

    pub fn slots(&self) -> usize {
        self.slots.max(1)
    }
}

#[inline]
fn term(t: &CTerm, m: &Structure, env: &[usize]) -> usize {
    match t {
        CTerm::Var(s) => env[*s],
        CTerm::Const(c) => m.constant(*c),
        CTerm::App(f, args) => {
            let n = m.size();
            let idx = args.iter().fold(0, |acc, a| acc * n + term(a, m, env));
            m.function_table(*f)[idx]
        }
    }
}

fn eval_node(node: &Node, m: &Structure, env: &mut [usize]) -> bool {
    match node {
        Node::Bool(b) => *b,
        Node::Rel(r, args) => {
            let n = m.size();
            let idx = args.iter().fold(0, |acc, a| acc * n + term(a, m, env));
            m.relation_table(*r)[idx]
        }
        Node::Eq(a, b) => term(a, m, env) == term(b, m, env),
        Node::Not(g) => !eval_node(g, m, env),
        Node::And(gs) => gs.iter().all(|g| eval_node(g, m, env)),
        Node::Or(gs) => gs.iter().any(|g| eval_node(g, m, env)),
        Node::Quant(q, slots, body) => quant(*q == Quantifier::Forall, slots, body, m, env),
    }
}

fn quant(forall: bool, slots: &[usize], body: &Node, m: &Structure, env: &mut [usize]) -> bool {
    let Some((&s, rest)) = slots.split_first() else {
        return eval_node(body, m, env);
    };
    for e in 0..m.size() {
        env[s] = e;
        if quant(forall, rest, body, m, env) != forall {
            return !forall;
        }
    }
    forall
}

/// Truth of `f` in `m` under `env`, which must bind every free variable.
pub fn evaluate(m: &Structure, f: &Formula, env: &Assignment) -> Result<bool> {
    let free = f.free_vars();
    let mut args = Vec::with_capacity(free.len());
    for v in &free {
        match env.get(v) {
            Some(&e) if e < m.size() => args.push(e),
            Some(&e) => return Err(Error::Invalid(format!("`{v}` is assigned {e}, outside the domain"))),
            None => return Err(Error::UnboundVariable(v.clone())),
        }
    }
    Ok(Compiled::with_free(f, m.signature(), &free)?.eval(m, &args))
}

/// Truth of a sentence in `m`.
pub fn satisfies(m: &Structure, f: &Formula) -> Result<bool> {
    evaluate(m, f, &Assignment::new())
}

/// Source of truth values for three-valued evaluation; `None` means unknown.
pub(crate) trait Partial {
    fn var(&self, slot: usize) -> Option<usize>;
    fn constant(&self, c: usize) -> Option<usize>;
    fn apply(&self, f: usize, args: &[usize]) -> Option<usize>;
    fn atom(&self, r: usize, args: &[usize]) -> Option<bool>;
    fn equal(&self, a: usize, b: usize) -> Option<bool> {
        Some(a == b)
    }
}

fn term3(t: &CTerm, p: &impl Partial) -> Option<usize> {
    match t {
        CTerm::Var(s) => p.var(*s),
        CTerm::Const(c) => p.constant(*c),
        CTerm::App(f, args) => {
            let vals = args.iter().map(|a| term3(a, p)).collect::<Option<Vec<_>>>()?;
            p.apply(*f, &vals)
        }
    }
}

/// Kleene evaluation of a quantifier-free node.
pub(crate) fn eval3(node: &Node, p: &impl Partial) -> Option<bool> {
    match node {
        Node::Bool(b) => Some(*b),
        Node::Rel(r, args) => {
            let vals = args.iter().map(|a| term3(a, p)).collect::<Option<Vec<_>>>()?;
            p.atom(*r, &vals)
        }
        Node::Eq(a, b) => p.equal(term3(a, p)?, term3(b, p)?),
        Node::Not(g) => eval3(g, p).map(|b| !b),
        Node::And(gs) => {
            let mut unknown = false;
            for g in gs {
                match eval3(g, p) {
                    Some(false) => return Some(false),
                    None => unknown = true,
                    Some(true) => {}
                }
            }
            if unknown {
                None
            } else {
                Some(true)
            }
        }
        Node::Or(gs) => {
            let mut unknown = false;
            for g in gs {
                match eval3(g, p) {
                    Some(true) => return Some(true),
                    None => unknown = true,
                    Some(false) => {}
                }
            }
            if unknown {
                None
            } else {
                Some(false)
            }
        }
        Node::Quant(..) => None,
    }
}

/// A universal sentence split into its variables and compiled matrix.
#[derive(Clone, Debug)]
pub struct UniversalSentence {
    pub vars: Vec<String>,
    pub(crate) matrix: Node,
}

impl UniversalSentence {
    /// Fails with [`Error::Unsupported`] unless the prenex form is `∀*`.
    pub fn new(f: &Formula, sig: &Signature) -> Result<UniversalSentence> {
        let p = to_prenex(f);
        let mut vars = Vec::new();
        let mut cur = &p;
        loop {
            match cur {
                Formula::Quant(Quantifier::Forall, vs, body) => {
                    vars.extend(vs.iter().cloned());
                    cur = body;
                }
                Formula::Quant(Quantifier::Exists, ..) => {
                    return Err(Error::Unsupported(format!("`{f}` is not universal")));
                }
                _ => break,
            }
        }
        if !cur.is_quantifier_free() {
            return Err(Error::Unsupported(format!("`{f}` is not universal")));
        }
        let free = cur.free_vars();
        if let Some(v) = free.iter().find(|v| !vars.contains(v)) {
            return Err(Error::OpenFormula(v.clone()));
        }
        let mut c = Compiler { sig, names: vars.clone() };
        let matrix = c.node(cur)?;
        Ok(UniversalSentence { vars, matrix })
    }

    /// First assignment (as elements in variable order) falsifying the matrix
    /// in `m` that uses at least one element of `must_touch` (all elements when `None`).
    pub fn counterexample(&self, m: &Structure, must_touch: Option<&[bool]>) -> Option<Vec<usize>> {
        self.falsifier(m.size(), must_touch, &|env| eval3(&self.matrix, &Total { m, env }))
    }

    /// Depth-first search over assignments into `0..n` in lexicographic order.
    /// `judge` gives the Kleene value of the matrix under a partial assignment;
    /// the search prunes on `Some(true)` and stops at the first `Some(false)`.
    pub(crate) fn falsifier(
        &self,
        n: usize,
        touch: Option<&[bool]>,
        judge: &dyn Fn(&[Option<usize>]) -> Option<bool>,
    ) -> Option<Vec<usize>> {
        let mut env: Vec<Option<usize>> = vec![None; self.vars.len()];
        self.search(n, touch, judge, &mut env, 0, touch.is_none())
    }

    fn search(
        &self,
        n: usize,
        touch: Option<&[bool]>,
        judge: &dyn Fn(&[Option<usize>]) -> Option<bool>,
        env: &mut Vec<Option<usize>>,
        depth: usize,
        touched: bool,
    ) -> Option<Vec<usize>> {
        match judge(env) {
            Some(true) => return None,
            Some(false) if touched => {
                // unassigned variables cannot change the verdict
                return Some(env.iter().map(|v| v.unwrap_or(0)).collect());
            }
            _ => {}
        }
        if depth == self.vars.len() {
            return None;
        }
        for e in 0..n {
            env[depth] = Some(e);
            let t = touched || touch.is_some_and(|t| t[e]);
            let remaining = self.vars.len() - depth - 1;
            if t || remaining > 0 {
                if let Some(w) = self.search(n, touch, judge, env, depth + 1, t) {
                    env[depth] = None;
                    return Some(w);
                }
            }
        }
        env[depth] = None;
        None
    }

    pub fn holds(&self, m: &Structure) -> bool {
        self.counterexample(m, None).is_none()
    }
}

struct Total<'a> {
    m: &'a Structure,
    env: &'a [Option<usize>],
}

impl Partial for Total<'_> {
    fn var(&self, slot: usize) -> Option<usize> {
        self.env[slot]
    }
    fn constant(&self, c: usize) -> Option<usize> {
        Some(self.m.constant(c))
    }
    fn apply(&self, f: usize, args: &[usize]) -> Option<usize> {
        Some(self.m.apply(f, args))
    }
    fn atom(&self, r: usize, args: &[usize]) -> Option<bool> {
        Some(self.m.holds(r, args))
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::config::Limits;
    use crate::logic::parse::parse_formula;
    use crate::sigstruct::enumerate_structures;

    fn digraph() -> Arc<Signature> {
        Arc::new(Signature::new("g").with_relation("edge", 2).unwrap())
    }

    fn cycle3() -> Structure {
        let mut m = Structure::with_size(digraph(), 3).unwrap();
        for i in 0..3 {
            m.set(0, &[i, (i + 1) % 3], true);
        }
        m
    }

    #[test]
    fn acyclicity_axioms_on_the_three_cycle() {
        let a1 = parse_formula("forall x. !edge(x,x)", &digraph()).unwrap();
        let a3 = parse_formula("forall x1,x2,x3. !(edge(x1,x2) & edge(x2,x3) & edge(x3,x1))", &digraph()).unwrap();
        assert!(satisfies(&cycle3(), &a1).unwrap());
        assert!(!satisfies(&cycle3(), &a3).unwrap());
        assert!(satisfies(&cycle3(), &parse_formula("forall x. x = x", &digraph()).unwrap()).unwrap());
        let u = UniversalSentence::new(&a3, &digraph()).unwrap();
        assert_eq!(u.counterexample(&cycle3(), None), Some(vec![0, 1, 2]));
    }

    #[test]
    fn environment_is_checked() {
        let f = parse_formula("edge(x,y)", &digraph()).unwrap();
        let env: Assignment = [("x".to_string(), 0)].into();
        assert!(matches!(evaluate(&cycle3(), &f, &env), Err(Error::UnboundVariable(_))));
        let env: Assignment = [("x".to_string(), 0), ("y".to_string(), 1)].into();
        assert!(evaluate(&cycle3(), &f, &env).unwrap());
        let other = Signature::new("h").with_relation("R", 2).unwrap();
        let g = parse_formula("forall x. R(x,x)", &other).unwrap();
        assert!(matches!(satisfies(&cycle3(), &g), Err(Error::SignatureMismatch(_))));
    }

    #[test]
    fn compiled_agrees_with_prenex_on_small_digraphs() {
        let sig = digraph();
        let texts = [
            "forall x. exists y. edge(x,y) & !(exists z. edge(z,x) <-> edge(y,z))",
            "(forall x. edge(x,x)) -> exists y,z. y != z & edge(y,z)",
            "forall x,y. (exists t. edge(x,t) & edge(t,y)) | (exists t. edge(y,t))",
        ];
        for text in texts {
            let f = parse_formula(text, &sig).unwrap();
            let p = to_prenex(&f);
            let cf = Compiled::new(&f, &sig).unwrap();
            let cp = Compiled::new(&p, &sig).unwrap();
            for n in 1..=3 {
                for m in enumerate_structures(&sig, n, &Limits::default()).unwrap() {
                    assert_eq!(cf.eval(&m, &[]), cp.eval(&m, &[]), "{text}");
                }
            }
        }
    }
}
