//! Expanding relations defined by existential formulas.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::logic::{parse_formula_extending, prenex_level, Formula, Quantifier, Term};
use crate::sigstruct::Signature;

/// `R(p1,…,pk) := body`, where `body` is existential with free variables among the `pi`.
#[derive(Clone, Debug, PartialEq)]
pub struct Definition {
    pub params: Vec<String>,
    pub body: Formula,
}

impl Definition {
    pub fn new(params: Vec<String>, body: Formula) -> Result<Definition> {
        if let Some(v) = body.free_vars().into_iter().find(|v| !params.contains(v)) {
            return Err(Error::UnboundVariable(v));
        }
        let level = prenex_level(&body);
        if level.blocks > 1 || level.first == Some(Quantifier::Forall) {
            return Err(Error::Invalid(format!("definition body `{body}` is not existential")));
        }
        Ok(Definition { params, body })
    }
}

/// Parses `R(x,y) := exists t. RA(x,y,t)`. Returns the defined name and definition.
pub fn parse_definition(text: &str, base: &Signature) -> Result<(String, Definition)> {
    let (head, body) = text.split_once(":=").ok_or_else(|| Error::Invalid(format!("expected `R(x,…) := φ` in `{text}`")))?;
    let head = head.trim();
    let (name, rest) = head.split_once('(').ok_or_else(|| Error::Invalid(format!("bad definition head `{head}`")))?;
    let params: Vec<String> = rest
        .strip_suffix(')')
        .ok_or_else(|| Error::Invalid(format!("bad definition head `{head}`")))?
        .split(',')
        .map(|p| p.trim().to_string())
        .filter(|p| !p.is_empty())
        .collect();
    let body = parse_formula_extending(body.trim(), base)?.0;
    Ok((name.trim().to_string(), Definition::new(params, body)?))
}

/// Replaces every atom `R(t̄)` with a definition by the definition body
/// instantiated at `t̄`, renaming bound variables to avoid capture.
pub fn rewrite_derived_relation(f: &Formula, defs: &BTreeMap<String, Definition>) -> Result<Formula> {
    Ok(match f {
        Formula::Rel(r, args) => match defs.get(r) {
            None => f.clone(),
            Some(d) => {
                if d.params.len() != args.len() {
                    return Err(Error::Arity { symbol: r.clone(), expected: d.params.len(), got: args.len() });
                }
                instantiate(d, args)
            }
        },
        Formula::True | Formula::False | Formula::Eq(..) => f.clone(),
        Formula::Not(g) => Formula::not(rewrite_derived_relation(g, defs)?),
        Formula::And(fs) => Formula::And(fs.iter().map(|g| rewrite_derived_relation(g, defs)).collect::<Result<_>>()?),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| rewrite_derived_relation(g, defs)).collect::<Result<_>>()?),
        Formula::Implies(a, b) => Formula::implies(rewrite_derived_relation(a, defs)?, rewrite_derived_relation(b, defs)?),
        Formula::Iff(a, b) => Formula::iff(rewrite_derived_relation(a, defs)?, rewrite_derived_relation(b, defs)?),
        Formula::Quant(q, vs, body) => Formula::Quant(*q, vs.clone(), Box::new(rewrite_derived_relation(body, defs)?)),
    })
}

/// Simultaneous substitution of `args` for the parameters, through fresh
/// intermediate names.
fn instantiate(d: &Definition, args: &[Term]) -> Formula {
    let mut taken: BTreeSet<String> = d.body.all_vars();
    taken.extend(d.params.iter().cloned());
    for a in args {
        let mut vs = Vec::new();
        collect(a, &mut vs);
        taken.extend(vs);
    }
    let mut body = d.body.clone();
    let mut temps = Vec::new();
    for (i, p) in d.params.iter().enumerate() {
        let mut t = format!("_p{i}");
        while taken.contains(&t) {
            t.push('\'');
        }
        taken.insert(t.clone());
        body = body.substitute(p, &Term::Var(t.clone()));
        temps.push(t);
    }
    for (t, a) in temps.iter().zip(args) {
        body = body.substitute(t, a);
    }
    body
}

fn collect(t: &Term, out: &mut Vec<String>) {
    match t {
        Term::Var(v) => out.push(v.clone()),
        Term::Const(_) => {}
        Term::App(_, args) => args.iter().for_each(|a| collect(a, out)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{classify_syntax, parse_formula, to_prenex};

    fn setup() -> (Signature, BTreeMap<String, Definition>) {
        let base = Signature::new("pref").with_relation("RA", 3).unwrap();
        let (name, def) = parse_definition("R(x,y) := exists t. RA(x,y,t)", &base).unwrap();
        (base, BTreeMap::from([(name, def)]))
    }

    fn derived() -> Signature {
        Signature::new("derived").with_relation("R", 2).unwrap()
    }

    #[test]
    fn uncaf_over_derived_is_universal_over_base() {
        let (_, defs) = setup();
        let f = parse_formula("forall x,y. !(R(x,y) & R(y,x))", &derived()).unwrap();
        assert!(classify_syntax(&f).unwrap().uncaf);
        let g = rewrite_derived_relation(&f, &defs).unwrap();
        let class = classify_syntax(&g).unwrap();
        assert!(class.universal && !class.uncaf);
        assert!(prenex_level(&to_prenex(&g)).is_pi(1));
    }

    #[test]
    fn completeness_over_derived_is_pi_two() {
        let (_, defs) = setup();
        let f = parse_formula("forall x,y. R(x,y) | R(y,x)", &derived()).unwrap();
        let g = rewrite_derived_relation(&f, &defs).unwrap();
        let level = prenex_level(&g);
        assert_eq!(level.to_string(), "Pi2");
        assert!(!classify_syntax(&g).unwrap().universal);
    }

    #[test]
    fn identity_definition_changes_nothing() {
        let sig = derived();
        let f = parse_formula("forall x,y. R(x,y) | R(y,x)", &sig).unwrap();
        let defs = BTreeMap::from([("R".to_string(), Definition::new(vec!["x".into(), "y".into()], Formula::rel("R", &["x", "y"])).unwrap())]);
        assert_eq!(rewrite_derived_relation(&f, &defs).unwrap(), f);
    }

    #[test]
    fn parameters_are_substituted_simultaneously() {
        let (_, defs) = setup();
        let f = parse_formula("forall x,y. R(y,x)", &derived()).unwrap();
        let g = rewrite_derived_relation(&f, &defs).unwrap();
        assert_eq!(g.to_string(), "forall x,y. exists t. RA(y,x,t)");
    }

    #[test]
    fn capture_is_avoided_and_arity_checked() {
        let (_, defs) = setup();
        let f = parse_formula("forall t,y. R(t,y)", &derived()).unwrap();
        let g = rewrite_derived_relation(&f, &defs).unwrap();
        assert_eq!(g.to_string(), "forall t,y. exists t'. RA(t,y,t')");
        let bad = Formula::Rel("R".into(), vec![Term::var("x")]);
        assert!(matches!(rewrite_derived_relation(&bad, &defs), Err(Error::Arity { .. })));
        assert!(Definition::new(vec!["x".into()], parse_formula("forall y. RA(x,y,y)", &Signature::new("b").with_relation("RA", 3).unwrap()).unwrap()).is_err());
    }
}
