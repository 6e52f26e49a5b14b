use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lexer::Cursor;
use crate::sigstruct::text::signature_body;
use crate::sigstruct::{Signature, Structure};

use super::ast::Formula;
use super::eval::Compiled;
use super::parse::{parse_formula, parse_formula_infer};

/// A named set of sentences over one signature.
#[derive(Clone, Debug, PartialEq)]
pub struct Theory {
    pub name: String,
    pub sig: Arc<Signature>,
    pub sentences: Vec<Formula>,
}

impl Theory {
    pub fn new(name: &str, sig: Arc<Signature>, sentences: Vec<Formula>) -> Result<Theory> {
        for s in &sentences {
            if let Some(v) = s.free_vars().first() {
                return Err(Error::OpenFormula(v.clone()));
            }
            Compiled::new(s, &sig)?;
        }
        Ok(Theory { name: name.to_string(), sig, sentences })
    }

    /// Reads the `.fot` format: an optional `sig` declaration, then one
    /// sentence per line, with `#` comments. Without a declaration the
    /// signature is inferred from the sentences.
    pub fn parse(name: &str, text: &str) -> Result<Theory> {
        let mut declared: Option<Signature> = None;
        let mut lines: Vec<(usize, &str)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with("sig ") {
                if declared.is_some() || !lines.is_empty() {
                    return Err(Error::Invalid(format!("line {}: the signature must come first and only once", i + 1)));
                }
                let mut cur = Cursor::new(line)?;
                declared = Some(signature_body(&mut cur)?);
                cur.expect_end()?;
                continue;
            }
            lines.push((i + 1, line));
        }
        let at = |line: usize, e: Error| match e {
            Error::Syntax { pos, msg } => Error::Syntax { pos: crate::error::Pos { line, col: pos.col }, msg },
            other => other,
        };
        let sig = match declared {
            Some(s) => s,
            None => {
                let mut sig = Signature::new(name);
                for &(line, text) in &lines {
                    let (_, s) = parse_formula_infer(text, name).map_err(|e| at(line, e))?;
                    sig = sig.merge(&s)?;
                }
                sig
            }
        };
        let mut sentences = Vec::new();
        for (line, text) in lines {
            let f = parse_formula(text, &sig).map_err(|e| at(line, e))?;
            if let Some(v) = f.free_vars().first() {
                return Err(Error::OpenFormula(format!("{v} (line {line})")));
            }
            sentences.push(f);
        }
        Theory::new(name, Arc::new(sig), sentences)
    }

    pub fn load(path: &Path) -> Result<Theory> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("theory");
        Theory::parse(name, &text)
    }

    /// Renders the theory in `.fot` form.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.sig);
        for s in &self.sentences {
            out.push_str(&format!("{s}\n"));
        }
        out
    }

    pub fn compile(&self) -> Result<Vec<Compiled>> {
        self.sentences.iter().map(|s| Compiled::new(s, &self.sig)).collect()
    }

    /// Whether `m` satisfies every sentence.
    pub fn is_model(&self, m: &Structure) -> Result<bool> {
        self.sig.ensure_same(m.signature())?;
        Ok(self.compile()?.iter().all(|c| c.eval(m, &[])))
    }
}
