use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::ast::{Formula, Term};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) | Term::Const(v) => f.write_str(v),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Quant(..) => 0,
        Formula::Iff(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(v) if v.len() > 1 => 3,
        Formula::And(v) if v.len() > 1 => 4,
        _ => 5,
    }
}

fn write(f: &Formula, need: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let paren = prec(f) < need;
    if paren {
        out.write_str("(")?;
    }
    match f {
        Formula::True => out.write_str("true")?,
        Formula::False => out.write_str("false")?,
        Formula::Rel(r, args) => {
            write!(out, "{r}(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.write_str(",")?;
                }
                write!(out, "{a}")?;
            }
            out.write_str(")")?;
        }
        Formula::Eq(a, b) => write!(out, "{a} = {b}")?,
        Formula::Not(inner) => match &**inner {
            Formula::Eq(a, b) => write!(out, "{a} != {b}")?,
            g => {
                out.write_str("!")?;
                write(g, 5, out)?;
            }
        },
        Formula::And(fs) | Formula::Or(fs) if fs.is_empty() => {
            out.write_str(if matches!(f, Formula::And(_)) { "true" } else { "false" })?
        }
        Formula::And(fs) | Formula::Or(fs) if fs.len() == 1 => write(&fs[0], need, out)?,
        Formula::And(fs) => {
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    out.write_str(" & ")?;
                }
                write(g, 5, out)?;
            }
        }
        Formula::Or(fs) => {
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    out.write_str(" | ")?;
                }
                write(g, 4, out)?;
            }
        }
        Formula::Implies(a, b) => {
            write(a, 3, out)?;
            out.write_str(" -> ")?;
            write(b, 2, out)?;
        }
        Formula::Iff(a, b) => {
            write(a, 1, out)?;
            out.write_str(" <-> ")?;
            write(b, 2, out)?;
        }
        Formula::Quant(q, vs, body) => {
            write!(out, "{} {}. ", q.keyword(), vs.join(","))?;
            write(body, 0, out)?;
        }
    }
    if paren {
        out.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write(self, 0, f)
    }
}

/// Renames bound variables to `x0, x1, …` in binding order, skipping names
/// that occur free or as constants.
pub fn canonical_names(f: &Formula) -> Formula {
    let mut avoid: BTreeSet<String> = f.free_vars().into_iter().collect();
    avoid.extend(f.symbols().2);
    let mut next = 0;
    rename(f, &mut BTreeMap::new(), &avoid, &mut next)
}

fn rename_term(t: &Term, map: &BTreeMap<String, String>) -> Term {
    match t {
        Term::Var(v) => Term::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
        Term::Const(_) => t.clone(),
        Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| rename_term(a, map)).collect()),
    }
}

fn rename(f: &Formula, map: &mut BTreeMap<String, String>, avoid: &BTreeSet<String>, next: &mut usize) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Rel(r, args) => Formula::Rel(r.clone(), args.iter().map(|a| rename_term(a, map)).collect()),
        Formula::Eq(a, b) => Formula::Eq(rename_term(a, map), rename_term(b, map)),
        Formula::Not(g) => Formula::not(rename(g, map, avoid, next)),
        Formula::And(fs) => Formula::And(fs.iter().map(|g| rename(g, map, avoid, next)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| rename(g, map, avoid, next)).collect()),
        Formula::Implies(a, b) => Formula::implies(rename(a, map, avoid, next), rename(b, map, avoid, next)),
        Formula::Iff(a, b) => Formula::iff(rename(a, map, avoid, next), rename(b, map, avoid, next)),
        Formula::Quant(q, vs, body) => {
            let saved: Vec<(String, Option<String>)> = vs.iter().map(|v| (v.clone(), map.get(v).cloned())).collect();
            let mut names = Vec::new();
            for v in vs {
                let mut name = format!("x{next}");
                while avoid.contains(&name) {
                    *next += 1;
                    name = format!("x{next}");
                }
                *next += 1;
                map.insert(v.clone(), name.clone());
                names.push(name);
            }
            let body = rename(body, map, avoid, next);
            for (v, old) in saved {
                match old {
                    Some(o) => map.insert(v, o),
                    None => map.remove(&v),
                };
            }
            Formula::Quant(*q, names, Box::new(body))
        }
    }
}
