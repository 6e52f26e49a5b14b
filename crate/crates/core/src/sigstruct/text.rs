//! Reading and writing signatures and structures.
//!
//! ```text
//! sig g { rel R/2; fun f/1; const c0 }
//! structure m over g { dom = {a,b,c}; R = {(a,b),(b,c)}; f = {a->b, b->c, c->a}; c0 = a }
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lexer::{Cursor, Tok};

use super::signature::{Signature, SymbolKind};
use super::structure::{tuple_index, Structure};

/// A file holding any number of signatures and structures.
#[derive(Clone, Debug, Default)]
pub struct Document {
    pub signatures: Vec<Arc<Signature>>,
    pub structures: Vec<(String, Structure)>,
}

impl Document {
    pub fn signature(&self, name: &str) -> Option<&Arc<Signature>> {
        self.signatures.iter().find(|s| s.name == name)
    }

    /// The single structure in the document, or an error naming the count.
    pub fn only_structure(&self) -> Result<&Structure> {
        match self.structures.as_slice() {
            [(_, m)] => Ok(m),
            other => Err(Error::Invalid(format!("expected exactly one structure, found {}", other.len()))),
        }
    }
}

pub fn parse_signature(src: &str) -> Result<Signature> {
    let mut cur = Cursor::new(src)?;
    let sig = signature_body(&mut cur)?;
    cur.expect_end()?;
    Ok(sig)
}

/// Parses one structure. `over` names are resolved against `known`; an
/// unknown name makes the signature inferred from the body.
pub fn parse_structure(src: &str, known: &[Arc<Signature>]) -> Result<(String, Structure)> {
    let doc = parse_document_with(src, known)?;
    let mut it = doc.structures.into_iter();
    match (it.next(), it.next()) {
        (Some(s), None) => Ok(s),
        _ => Err(Error::Invalid("expected exactly one structure".into())),
    }
}

pub fn parse_document(src: &str) -> Result<Document> {
    parse_document_with(src, &[])
}

pub fn parse_document_with(src: &str, known: &[Arc<Signature>]) -> Result<Document> {
    let mut cur = Cursor::new(src)?;
    let mut doc = Document::default();
    while !cur.at_end() {
        if cur.at_keyword("sig") {
            doc.signatures.push(Arc::new(signature_body(&mut cur)?));
        } else if cur.at_keyword("structure") {
            let s = structure_body(&mut cur, &doc.signatures, known)?;
            doc.structures.push(s);
        } else {
            return Err(cur.error(format!("expected `sig` or `structure`, found {}", cur.peek().describe())));
        }
        cur.eat(&Tok::Semi);
    }
    Ok(doc)
}

pub(crate) fn signature_body(cur: &mut Cursor) -> Result<Signature> {
    cur.keyword("sig")?;
    let mut sig = Signature::new(cur.ident()?);
    cur.expect(&Tok::LBrace)?;
    while !cur.eat(&Tok::RBrace) {
        let pos = cur.pos();
        let kind = cur.ident()?;
        loop {
            let name = cur.ident()?;
            let res = match kind.as_str() {
                "rel" | "fun" => {
                    cur.expect(&Tok::Slash)?;
                    let arity = cur.number()?;
                    if kind == "rel" {
                        sig.add_relation(&name, arity)
                    } else {
                        sig.add_function(&name, arity)
                    }
                }
                "const" => sig.add_constant(&name),
                _ => return Err(Error::Syntax { pos, msg: format!("expected `rel`, `fun` or `const`, found `{kind}`") }),
            };
            res?;
            if !cur.eat(&Tok::Comma) {
                break;
            }
        }
        if !cur.eat(&Tok::Semi) && *cur.peek() != Tok::RBrace {
            return Err(cur.error(format!("expected `;` or `}}`, found {}", cur.peek().describe())));
        }
    }
    Ok(sig)
}

enum Value {
    Tuples(Vec<Vec<String>>),
    Map(Vec<(Vec<String>, String)>),
    Element(String),
    Empty,
}

fn tuple(cur: &mut Cursor) -> Result<Vec<String>> {
    if cur.eat(&Tok::LParen) {
        let mut t = vec![cur.ident()?];
        while cur.eat(&Tok::Comma) {
            t.push(cur.ident()?);
        }
        cur.expect(&Tok::RParen)?;
        Ok(t)
    } else {
        Ok(vec![cur.ident()?])
    }
}

fn value(cur: &mut Cursor) -> Result<Value> {
    if !cur.eat(&Tok::LBrace) {
        return Ok(Value::Element(cur.ident()?));
    }
    if cur.eat(&Tok::RBrace) {
        return Ok(Value::Empty);
    }
    let first = tuple(cur)?;
    if cur.eat(&Tok::Implies) {
        let mut entries = vec![(first, cur.ident()?)];
        while cur.eat(&Tok::Comma) {
            let args = tuple(cur)?;
            cur.expect(&Tok::Implies)?;
            entries.push((args, cur.ident()?));
        }
        cur.expect(&Tok::RBrace)?;
        Ok(Value::Map(entries))
    } else {
        let mut ts = vec![first];
        while cur.eat(&Tok::Comma) {
            ts.push(tuple(cur)?);
        }
        cur.expect(&Tok::RBrace)?;
        Ok(Value::Tuples(ts))
    }
}

fn structure_body(cur: &mut Cursor, local: &[Arc<Signature>], known: &[Arc<Signature>]) -> Result<(String, Structure)> {
    cur.keyword("structure")?;
    let name = cur.ident()?;
    cur.keyword("over")?;
    let sig_pos = cur.pos();
    let sig_name = cur.ident()?;
    let declared = local.iter().rev().chain(known).find(|s| s.name == sig_name).cloned();
    cur.expect(&Tok::LBrace)?;
    let mut entries: Vec<(String, crate::error::Pos, Value)> = Vec::new();
    while !cur.eat(&Tok::RBrace) {
        let pos = cur.pos();
        let key = cur.ident()?;
        cur.expect(&Tok::Eq)?;
        entries.push((key, pos, value(cur)?));
        if !cur.eat(&Tok::Semi) && *cur.peek() != Tok::RBrace {
            return Err(cur.error(format!("expected `;` or `}}`, found {}", cur.peek().describe())));
        }
    }
    let dom = match entries.iter().position(|(k, _, _)| k == "dom") {
        Some(i) => match entries.remove(i).2 {
            Value::Tuples(ts) if ts.iter().all(|t| t.len() == 1) => ts.into_iter().map(|mut t| t.remove(0)).collect(),
            Value::Element(e) => vec![e],
            Value::Empty => return Err(Error::EmptyDomain),
            _ => return Err(Error::Syntax { pos: sig_pos, msg: "`dom` must be a set of element names".into() }),
        },
        None => return Err(Error::Syntax { pos: sig_pos, msg: format!("structure `{name}` has no `dom`") }),
    };
    let sig = match declared {
        Some(s) => s,
        None => Arc::new(infer_signature(&sig_name, &entries)?),
    };
    let mut m = Structure::new(sig.clone(), dom)?;
    let elem = |m: &Structure, e: &str| m.element(e).ok_or_else(|| Error::InvalidStructure(format!("`{e}` is not in the domain")));
    let mut seen: BTreeMap<String, ()> = BTreeMap::new();
    for (key, pos, val) in &entries {
        if seen.insert(key.clone(), ()).is_some() {
            return Err(Error::Syntax { pos: *pos, msg: format!("`{key}` is interpreted twice") });
        }
        match (sig.lookup(key), val) {
            (None, _) => return Err(Error::UnknownSymbol(key.clone())),
            (Some(SymbolKind::Relation(_)), Value::Empty) => {}
            (Some(SymbolKind::Relation(r)), Value::Tuples(ts)) => {
                let arity = sig.relations()[r].arity;
                for t in ts {
                    if t.len() != arity {
                        return Err(Error::Arity { symbol: key.clone(), expected: arity, got: t.len() });
                    }
                    let ids = t.iter().map(|e| elem(&m, e)).collect::<Result<Vec<_>>>()?;
                    m.set(r, &ids, true);
                }
            }
            (Some(SymbolKind::Function(f)), Value::Map(es)) => {
                let arity = sig.functions()[f].arity;
                let mut defined = vec![false; m.size().pow(arity as u32)];
                for (args, v) in es {
                    if args.len() != arity {
                        return Err(Error::Arity { symbol: key.clone(), expected: arity, got: args.len() });
                    }
                    let ids = args.iter().map(|e| elem(&m, e)).collect::<Result<Vec<_>>>()?;
                    let idx = tuple_index(m.size(), &ids);
                    if std::mem::replace(&mut defined[idx], true) {
                        return Err(Error::InvalidStructure(format!("`{key}` is defined twice at ({})", args.join(","))));
                    }
                    let v = elem(&m, v)?;
                    m.set_function(f, &ids, v);
                }
                if defined.iter().any(|d| !d) {
                    return Err(Error::InvalidStructure(format!("function `{key}` is not total")));
                }
            }
            (Some(SymbolKind::Constant(c)), Value::Element(e)) => {
                let v = elem(&m, e)?;
                m.set_constant(c, v);
            }
            _ => return Err(Error::Syntax { pos: *pos, msg: format!("value of `{key}` does not fit its symbol kind") }),
        }
    }
    for f in sig.functions() {
        if !seen.contains_key(&f.name) {
            return Err(Error::InvalidStructure(format!("function `{}` is not interpreted", f.name)));
        }
    }
    for c in sig.constants() {
        if !seen.contains_key(c) {
            return Err(Error::InvalidStructure(format!("constant `{c}` is not interpreted")));
        }
    }
    Ok((name, m))
}

fn infer_signature(name: &str, entries: &[(String, crate::error::Pos, Value)]) -> Result<Signature> {
    let mut sig = Signature::new(name);
    for (key, pos, val) in entries {
        match val {
            Value::Tuples(ts) => {
                let arity = ts[0].len();
                if ts.iter().any(|t| t.len() != arity) {
                    return Err(Error::Arity { symbol: key.clone(), expected: arity, got: ts.iter().map(Vec::len).find(|&l| l != arity).unwrap() });
                }
                sig.add_relation(key, arity)?;
            }
            Value::Map(es) => {
                sig.add_function(key, es[0].0.len())?;
            }
            Value::Element(_) => {
                sig.add_constant(key)?;
            }
            Value::Empty => {
                return Err(Error::Syntax {
                    pos: *pos,
                    msg: format!("cannot infer the arity of empty `{key}`; declare signature `{name}` first"),
                })
            }
        }
    }
    Ok(sig)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = "sig g { rel R/2; fun f/1; const c0 }
        structure m over g { dom = {a,b,c}; R = {(a,b),(b,c)}; f = {a->b, b->c, c->a}; c0 = a }";

    #[test]
    fn parses_the_documented_example() {
        let doc = parse_document(TEXT).unwrap();
        let m = doc.only_structure().unwrap();
        assert_eq!(m.size(), 3);
        assert!(m.holds(0, &[0, 1]));
        assert!(!m.holds(0, &[1, 0]));
        assert_eq!(m.apply(0, &[2]), 0);
        assert_eq!(m.constant(0), 0);
    }

    #[test]
    fn printer_round_trips() {
        let doc = parse_document(TEXT).unwrap();
        let m = doc.only_structure().unwrap();
        let printed = m.to_text("m");
        let (_, again) = parse_structure(&printed, &doc.signatures).unwrap();
        assert_eq!(&again, m);
        assert_eq!(parse_signature(&doc.signatures[0].to_string()).unwrap(), *doc.signatures[0]);
    }

    #[test]
    fn infers_signatures_and_reports_errors() {
        let (_, m) = parse_structure("structure m over h { dom = {u,v}; E = {(u,v)}; H = {u} }", &[]).unwrap();
        assert_eq!(m.signature().relations().len(), 2);
        assert_eq!(m.signature().relations()[1].arity, 1);
        assert!(matches!(
            parse_structure("structure m over h { dom = {} }", &[]),
            Err(Error::EmptyDomain)
        ));
        assert!(parse_document("sig g { rel R/2 } structure m over g { dom = {a}; f = {a->a} }").is_err());
        assert!(parse_document("sig g { fun f/1 } structure m over g { dom = {a,b}; f = {a->a} }").is_err());
        assert!(matches!(parse_signature("sig g { rel R/2; bogus x }"), Err(Error::Syntax { .. })));
    }
}
