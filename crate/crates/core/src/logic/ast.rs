use std::collections::BTreeSet;

/// A first-order term. Symbols are referred to by name; well-signedness is
/// checked by the parser and again when a formula is compiled against a structure.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(name.to_string())
    }

    pub fn app(f: &str, args: Vec<Term>) -> Term {
        Term::App(f.to_string(), args)
    }

    pub(crate) fn vars_into(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.vars_into(out)),
        }
    }

    pub fn rename(&self, from: &str, to: &Term) -> Term {
        match self {
            Term::Var(v) if v == from => to.clone(),
            Term::Var(_) | Term::Const(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.rename(from, to)).collect()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn dual(self) -> Quantifier {
        match self {
            Quantifier::Forall => Quantifier::Exists,
            Quantifier::Exists => Quantifier::Forall,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }
}

/// First-order formula. `And` and `Or` are n-ary; an empty `And` is true and
/// an empty `Or` is false.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Rel(String, Vec<Term>),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Quant(Quantifier, Vec<String>, Box<Formula>),
}

impl Formula {
    pub fn rel(name: &str, args: &[&str]) -> Formula {
        Formula::Rel(name.to_string(), args.iter().map(|a| Term::var(a)).collect())
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(vars: &[String], body: Formula) -> Formula {
        Formula::Quant(Quantifier::Forall, vars.to_vec(), Box::new(body))
    }

    pub fn exists(vars: &[String], body: Formula) -> Formula {
        Formula::Quant(Quantifier::Exists, vars.to_vec(), Box::new(body))
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.free_into(&mut Vec::new(), &mut out);
        out
    }

    fn free_into(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        let push_term = |t: &Term, bound: &Vec<String>, out: &mut Vec<String>| {
            let mut vs = Vec::new();
            t.vars_into(&mut vs);
            for v in vs {
                if !bound.contains(&v) && !out.contains(&v) {
                    out.push(v);
                }
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Rel(_, args) => args.iter().for_each(|a| push_term(a, bound, out)),
            Formula::Eq(a, b) => {
                push_term(a, bound, out);
                push_term(b, bound, out);
            }
            Formula::Not(f) => f.free_into(bound, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.free_into(bound, out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.free_into(bound, out);
                b.free_into(bound, out);
            }
            Formula::Quant(_, vs, body) => {
                let depth = bound.len();
                bound.extend(vs.iter().cloned());
                body.free_into(bound, out);
                bound.truncate(depth);
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Rel(..) | Formula::Eq(..) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_quantifier_free),
            Formula::Implies(a, b) | Formula::Iff(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Formula::Quant(..) => false,
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            Formula::Rel(_, args) => {
                let mut vs = Vec::new();
                args.iter().for_each(|a| a.vars_into(&mut vs));
                out.extend(vs);
            }
            Formula::Eq(a, b) => {
                let mut vs = Vec::new();
                a.vars_into(&mut vs);
                b.vars_into(&mut vs);
                out.extend(vs);
            }
            Formula::Quant(_, vs, _) => out.extend(vs.iter().cloned()),
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn walk(&self, visit: &mut impl FnMut(&Formula)) {
        visit(self);
        match self {
            Formula::Not(f) | Formula::Quant(_, _, f) => f.walk(visit),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.walk(visit)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
            _ => {}
        }
    }

    /// Number of quantified variables.
    pub fn quantifier_count(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |f| {
            if let Formula::Quant(_, vs, _) = f {
                n += vs.len();
            }
        });
        n
    }

    /// Capture-avoiding substitution of `to` for the free variable `from`.
    pub fn substitute(&self, from: &str, to: &Term) -> Formula {
        let mut to_vars = Vec::new();
        to.vars_into(&mut to_vars);
        self.subst(from, to, &to_vars)
    }

    fn subst(&self, from: &str, to: &Term, to_vars: &[String]) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Rel(r, args) => Formula::Rel(r.clone(), args.iter().map(|a| a.rename(from, to)).collect()),
            Formula::Eq(a, b) => Formula::Eq(a.rename(from, to), b.rename(from, to)),
            Formula::Not(f) => Formula::not(f.subst(from, to, to_vars)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.subst(from, to, to_vars)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.subst(from, to, to_vars)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.subst(from, to, to_vars), b.subst(from, to, to_vars)),
            Formula::Iff(a, b) => Formula::iff(a.subst(from, to, to_vars), b.subst(from, to, to_vars)),
            Formula::Quant(q, vs, body) => {
                if vs.iter().any(|v| v == from) {
                    return self.clone();
                }
                let mut vs = vs.clone();
                let mut body = (**body).clone();
                let mut taken = self.all_vars();
                taken.extend(to_vars.iter().cloned());
                taken.insert(from.to_string());
                for v in vs.iter_mut() {
                    if to_vars.contains(v) {
                        let fresh = fresh_name(v, &taken);
                        taken.insert(fresh.clone());
                        body = body.substitute(v, &Term::Var(fresh.clone()));
                        *v = fresh;
                    }
                }
                Formula::Quant(*q, vs, Box::new(body.subst(from, to, to_vars)))
            }
        }
    }

    /// Relation and function symbols with their arities, and constant names.
    pub fn symbols(&self) -> (Vec<(String, usize)>, Vec<(String, usize)>, Vec<String>) {
        let (mut rels, mut funs, mut consts) = (Vec::new(), Vec::new(), Vec::new());
        fn term(t: &Term, funs: &mut Vec<(String, usize)>, consts: &mut Vec<String>) {
            match t {
                Term::Var(_) => {}
                Term::Const(c) => {
                    if !consts.contains(c) {
                        consts.push(c.clone());
                    }
                }
                Term::App(f, args) => {
                    let key = (f.clone(), args.len());
                    if !funs.contains(&key) {
                        funs.push(key);
                    }
                    args.iter().for_each(|a| term(a, funs, consts));
                }
            }
        }
        self.walk(&mut |f| match f {
            Formula::Rel(r, args) => {
                let key = (r.clone(), args.len());
                if !rels.contains(&key) {
                    rels.push(key);
                }
                args.iter().for_each(|a| term(a, &mut funs, &mut consts));
            }
            Formula::Eq(a, b) => {
                term(a, &mut funs, &mut consts);
                term(b, &mut funs, &mut consts);
            }
            _ => {}
        });
        (rels, funs, consts)
    }
}

/// `base` decorated with primes until it avoids `taken`.
pub(crate) fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    let mut name = format!("{base}'");
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// Conjunction that collapses the trivial cases.
pub fn conj(mut fs: Vec<Formula>) -> Formula {
    match fs.len() {
        0 => Formula::True,
        1 => fs.pop().unwrap(),
        _ => Formula::And(fs),
    }
}

/// Disjunction that collapses the trivial cases.
pub fn disj(mut fs: Vec<Formula>) -> Formula {
    match fs.len() {
        0 => Formula::False,
        1 => fs.pop().unwrap(),
        _ => Formula::Or(fs),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_variables_respect_binders() {
        let f = Formula::And(vec![
            Formula::rel("R", &["x", "y"]),
            Formula::forall(&["y".into()], Formula::rel("R", &["y", "z"])),
        ]);
        assert_eq!(f.free_vars(), vec!["x", "y", "z"]);
        assert_eq!(f.quantifier_count(), 1);
    }

    #[test]
    fn substitution_avoids_capture() {
        let f = Formula::exists(&["y".into()], Formula::rel("R", &["x", "y"]));
        let g = f.substitute("x", &Term::var("y"));
        match g {
            Formula::Quant(_, vs, body) => {
                assert_eq!(vs, vec!["y'".to_string()]);
                assert_eq!(*body, Formula::rel("R", &["y", "y'"]));
            }
            other => panic!("{other:?}"),
        }
    }
}
