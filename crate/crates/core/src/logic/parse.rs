//! Formula reader.
//!
//! ```text
//! formula := iff
//! iff     := implies ("<->" implies)*          left associative
//! implies := or ("->" implies)?                right associative
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "!" unary | quant | primary
//! quant   := ("forall" | "exists") var ("," var)* "." formula
//! primary := "true" | "false" | "(" formula ")" | R "(" terms ")" | term ("=" | "!=") term
//! term    := var | const | f "(" terms ")"
//! ```
//!
//! A binder that shadows an enclosing binder of the same name is renamed by
//! appending primes, so no bound name is ever captured.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::lexer::{tokenize, Cursor, Tok};
use crate::sigstruct::{Signature, SymbolKind};

use super::ast::{fresh_name, Formula, Quantifier, Term};
use super::PartitionedFormula;

const KEYWORDS: [&str; 4] = ["forall", "exists", "true", "false"];

enum Mode<'a> {
    Fixed(&'a Signature),
    Infer(Signature),
}

struct Parser<'a> {
    cur: Cursor,
    mode: Mode<'a>,
    scope: Vec<(String, String)>,
    taken: BTreeSet<String>,
    free_as_vars: bool,
    split: Option<(Vec<Term>, Vec<Term>)>,
    allow_split: bool,
}

/// Parses a formula over `sig`. Unbound names that are not constants of the
/// signature are free variables.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula> {
    let mut p = Parser::new(text, Mode::Fixed(sig), true)?;
    let f = p.formula()?;
    p.cur.expect_end()?;
    Ok(f)
}

/// Parses a formula and infers its signature from the symbols used. Unbound
/// bare names become constants, so the result is always a sentence.
pub fn parse_formula_infer(text: &str, name: &str) -> Result<(Formula, Signature)> {
    let mut p = Parser::new(text, Mode::Infer(Signature::new(name)), false)?;
    let f = p.formula()?;
    p.cur.expect_end()?;
    match p.mode {
        Mode::Infer(sig) => Ok((f, sig)),
        Mode::Fixed(_) => unreachable!(),
    }
}

/// Like [`parse_formula_infer`] but extends `sig` instead of starting empty,
/// and keeps unbound names as free variables.
pub fn parse_formula_extending(text: &str, sig: &Signature) -> Result<(Formula, Signature)> {
    let mut p = Parser::new(text, Mode::Infer(sig.clone()), true)?;
    let f = p.formula()?;
    p.cur.expect_end()?;
    match p.mode {
        Mode::Infer(sig) => Ok((f, sig)),
        Mode::Fixed(_) => unreachable!(),
    }
}

/// Parses `R(x;y)`-style or `[x1,x2 ; y] formula` partitioned formulas. With
/// `sig = None` the signature is inferred and returned alongside.
pub fn parse_partitioned(text: &str, sig: Option<&Signature>) -> Result<(PartitionedFormula, Signature)> {
    let mode = match sig {
        Some(s) => Mode::Fixed(s),
        None => Mode::Infer(Signature::new("phi")),
    };
    let mut p = Parser::new(text, mode, true)?;
    let (objects, params, formula) = if p.cur.eat(&Tok::LBracket) {
        let mut xs = Vec::new();
        while *p.cur.peek() != Tok::Semi {
            xs.push(p.cur.ident()?);
            if !p.cur.eat(&Tok::Comma) {
                break;
            }
        }
        p.cur.expect(&Tok::Semi)?;
        let mut ys = Vec::new();
        while *p.cur.peek() != Tok::RBracket {
            ys.push(p.cur.ident()?);
            if !p.cur.eat(&Tok::Comma) {
                break;
            }
        }
        p.cur.expect(&Tok::RBracket)?;
        let f = p.formula()?;
        (xs, ys, f)
    } else {
        p.allow_split = true;
        let f = p.formula()?;
        let (before, after) = p
            .split
            .take()
            .ok_or_else(|| Error::Invalid("partitioned formula needs `;` between object and parameter variables".into()))?;
        let vars = |ts: &[Term]| {
            let mut vs = Vec::new();
            ts.iter().for_each(|t| t.vars_into(&mut vs));
            vs
        };
        (vars(&before), vars(&after), f)
    };
    p.cur.expect_end()?;
    let sig = match p.mode {
        Mode::Infer(s) => s,
        Mode::Fixed(s) => s.clone(),
    };
    Ok((PartitionedFormula::new(formula, objects, params)?, sig))
}

impl<'a> Parser<'a> {
    fn new(text: &str, mode: Mode<'a>, free_as_vars: bool) -> Result<Self> {
        let taken = tokenize(text)?
            .into_iter()
            .filter_map(|(t, _)| match t {
                Tok::Ident(s) => Some(s),
                _ => None,
            })
            .collect();
        Ok(Parser { cur: Cursor::new(text)?, mode, scope: Vec::new(), taken, free_as_vars, split: None, allow_split: false })
    }

    fn sig(&self) -> &Signature {
        match &self.mode {
            Mode::Fixed(s) => s,
            Mode::Infer(s) => s,
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut left = self.implies()?;
        while self.cur.eat(&Tok::Iff) {
            let right = self.implies()?;
            left = Formula::iff(left, right);
        }
        Ok(left)
    }

    fn implies(&mut self) -> Result<Formula> {
        let left = self.or()?;
        if self.cur.eat(&Tok::Implies) {
            let right = self.implies()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut parts = vec![self.and()?];
        while self.cur.eat(&Tok::Or) {
            parts.push(self.and()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::Or(parts) })
    }

    fn and(&mut self) -> Result<Formula> {
        let mut parts = vec![self.unary()?];
        while self.cur.eat(&Tok::And) {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::And(parts) })
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.cur.eat(&Tok::Not) {
            return Ok(Formula::not(self.unary()?));
        }
        if self.cur.at_keyword("forall") || self.cur.at_keyword("exists") {
            return self.quantified();
        }
        self.primary()
    }

    fn quantified(&mut self) -> Result<Formula> {
        let q = if self.cur.at_keyword("forall") { Quantifier::Forall } else { Quantifier::Exists };
        self.cur.bump();
        let depth = self.scope.len();
        let mut vars = Vec::new();
        loop {
            let pos = self.cur.pos();
            let v = self.cur.ident()?;
            if KEYWORDS.contains(&v.as_str()) || self.sig().lookup(&v).is_some() {
                return Err(Error::Syntax { pos, msg: format!("`{v}` cannot be used as a variable") });
            }
            let shadows = self.scope.iter().any(|(src, _)| *src == v) || vars.iter().any(|(src, _): &(String, String)| *src == v);
            let name = if shadows {
                let fresh = fresh_name(&v, &self.taken);
                self.taken.insert(fresh.clone());
                fresh
            } else {
                v.clone()
            };
            vars.push((v, name));
            if !self.cur.eat(&Tok::Comma) {
                break;
            }
        }
        self.cur.expect(&Tok::Dot)?;
        let names: Vec<String> = vars.iter().map(|(_, n)| n.clone()).collect();
        self.scope.extend(vars);
        let body = self.formula();
        self.scope.truncate(depth);
        Ok(Formula::Quant(q, names, Box::new(body?)))
    }

    fn primary(&mut self) -> Result<Formula> {
        if self.cur.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.cur.expect(&Tok::RParen)?;
            return Ok(f);
        }
        if self.cur.at_keyword("true") {
            self.cur.bump();
            return Ok(Formula::True);
        }
        if self.cur.at_keyword("false") {
            self.cur.bump();
            return Ok(Formula::False);
        }
        let pos = self.cur.pos();
        let name = match self.cur.peek().clone() {
            Tok::Ident(s) => s,
            other => return Err(self.cur.error(format!("expected a formula, found {}", other.describe()))),
        };
        self.cur.bump();
        let args = if *self.cur.peek() == Tok::LParen { Some(self.args(self.allow_split)?) } else { None };
        if matches!(self.cur.peek(), Tok::Eq | Tok::Neq) {
            let lhs = match args {
                Some(a) => self.application(&name, a)?,
                None => self.bare(&name)?,
            };
            let negated = self.cur.bump() == Tok::Neq;
            let rhs = self.term()?;
            let eq = Formula::Eq(lhs, rhs);
            return Ok(if negated { Formula::not(eq) } else { eq });
        }
        let Some(args) = args else {
            return Err(Error::Syntax { pos, msg: format!("expected a formula, found the term `{name}`") });
        };
        let arity = args.len();
        let found = self.sig().lookup(&name);
        match (&mut self.mode, found) {
            (_, Some(SymbolKind::Relation(i))) => {
                let expected = self.sig().relations()[i].arity;
                if expected != arity {
                    return Err(Error::Arity { symbol: name, expected, got: arity });
                }
            }
            (Mode::Infer(sig), None) => {
                sig.add_relation(&name, arity)?;
            }
            (Mode::Fixed(_), None) => return Err(Error::UnknownSymbol(name)),
            (_, Some(_)) => {
                return Err(Error::Syntax { pos, msg: format!("`{name}` is not a relation symbol") });
            }
        }
        Ok(Formula::Rel(name, args))
    }

    fn args(&mut self, allow_split: bool) -> Result<Vec<Term>> {
        self.cur.expect(&Tok::LParen)?;
        let mut args = vec![self.term()?];
        let mut split_at = None;
        loop {
            if self.cur.eat(&Tok::Comma) {
                args.push(self.term()?);
            } else if allow_split && split_at.is_none() && self.split.is_none() && self.cur.eat(&Tok::Semi) {
                split_at = Some(args.len());
                args.push(self.term()?);
            } else {
                break;
            }
        }
        self.cur.expect(&Tok::RParen)?;
        if let Some(k) = split_at {
            self.split = Some((args[..k].to_vec(), args[k..].to_vec()));
        }
        Ok(args)
    }

    fn term(&mut self) -> Result<Term> {
        let name = self.cur.ident()?;
        if *self.cur.peek() == Tok::LParen {
            let args = self.args(false)?;
            self.application(&name, args)
        } else {
            self.bare(&name)
        }
    }

    fn application(&mut self, name: &str, args: Vec<Term>) -> Result<Term> {
        let arity = args.len();
        let found = self.sig().lookup(name);
        match (&mut self.mode, found) {
            (_, Some(SymbolKind::Function(i))) => {
                let expected = self.sig().functions()[i].arity;
                if expected != arity {
                    return Err(Error::Arity { symbol: name.to_string(), expected, got: arity });
                }
            }
            (Mode::Infer(sig), None) => {
                sig.add_function(name, arity)?;
            }
            (Mode::Fixed(_), None) => return Err(Error::UnknownSymbol(name.to_string())),
            (_, Some(_)) => return Err(self.cur.error(format!("`{name}` is not a function symbol"))),
        }
        Ok(Term::App(name.to_string(), args))
    }

    fn bare(&mut self, name: &str) -> Result<Term> {
        if KEYWORDS.contains(&name) {
            return Err(self.cur.error(format!("`{name}` is a keyword")));
        }
        if let Some((_, renamed)) = self.scope.iter().rev().find(|(src, _)| src == name) {
            return Ok(Term::Var(renamed.clone()));
        }
        match self.sig().lookup(name) {
            Some(SymbolKind::Constant(_)) => return Ok(Term::Const(name.to_string())),
            Some(_) => return Err(self.cur.error(format!("`{name}` is not a constant or variable"))),
            None => {}
        }
        if self.free_as_vars {
            return Ok(Term::Var(name.to_string()));
        }
        match &mut self.mode {
            Mode::Infer(sig) => {
                sig.add_constant(name)?;
                Ok(Term::Const(name.to_string()))
            }
            Mode::Fixed(_) => Ok(Term::Var(name.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new("t")
            .with_relation("edge", 2)
            .unwrap()
            .with_relation("S", 1)
            .unwrap()
            .with_relation("W", 1)
            .unwrap()
            .with_function("f", 1)
            .unwrap()
            .with_constant("c")
            .unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse_formula("S(x) & W(x) | !S(x) -> W(x) -> S(x) <-> W(x) <-> S(x)", &sig()).unwrap();
        let Formula::Iff(left, _) = &f else { panic!("{f:?}") };
        let Formula::Iff(imp, _) = &**left else { panic!() };
        let Formula::Implies(or, rest) = &**imp else { panic!() };
        assert!(matches!(**or, Formula::Or(ref v) if v.len() == 2 && matches!(v[0], Formula::And(_))));
        assert!(matches!(**rest, Formula::Implies(..)));
    }

    #[test]
    fn quantifier_body_extends_right_and_shadowing_is_renamed() {
        let f = parse_formula("forall x. S(x) & exists x. edge(x,x) | W(x)", &sig()).unwrap();
        let Formula::Quant(Quantifier::Forall, vs, body) = f else { panic!() };
        assert_eq!(vs, vec!["x"]);
        let Formula::And(parts) = *body else { panic!() };
        let Formula::Quant(Quantifier::Exists, inner, _) = &parts[1] else { panic!() };
        assert_eq!(inner, &vec!["x'".to_string()]);
        assert!(parts[1].free_vars().is_empty());
    }

    #[test]
    fn terms_constants_and_equality() {
        let f = parse_formula("forall x. f(x) = c | x != f(f(x))", &sig()).unwrap();
        assert!(f.is_sentence());
        assert!(matches!(parse_formula("edge(x)", &sig()), Err(Error::Arity { .. })));
        assert!(matches!(parse_formula("R(x,y)", &sig()), Err(Error::UnknownSymbol(_))));
        assert!(matches!(parse_formula("forall x. edge(x,", &sig()), Err(Error::Syntax { .. })));
        assert!(matches!(parse_formula("S(x) S(x)", &sig()), Err(Error::Syntax { .. })));
    }

    #[test]
    fn inference_collects_symbols() {
        let (f, s) = parse_formula_infer("forall x. !(S(x) & !W(x)) & R(a, g(a))", "swan").unwrap();
        assert!(f.is_sentence());
        assert_eq!(s.relations().len(), 3);
        assert_eq!(s.functions()[0].name, "g");
        assert_eq!(s.constants(), ["a"]);
        assert!(parse_formula_infer("R(x) & R(x,y)", "bad").is_err());
    }

    #[test]
    fn partitioned_forms() {
        let (pf, s) = parse_partitioned("R(x;y)", None).unwrap();
        assert_eq!(pf.objects, vec!["x"]);
        assert_eq!(pf.params, vec!["y"]);
        assert_eq!(s.relations()[0].arity, 2);
        let (pf, _) = parse_partitioned("[x1,x2 ; y] edge(x1,y) & edge(y,x2)", Some(&sig())).unwrap();
        assert_eq!(pf.objects.len(), 2);
        assert!(parse_partitioned("[x ; y] edge(x,z)", Some(&sig())).is_err());
    }
}
