//! Time-indexed signatures and the theory of time-indexed structures.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::logic::Theory;
use crate::sigstruct::Signature;

/// Objects.
pub const OBJECT: &str = "O";
/// Times.
pub const TIME: &str = "tau";
/// Temporal order.
pub const BEFORE: &str = "lt";
/// Immediate successor, in the discrete language only.
pub const SUCC: &str = "succ";

/// Each `R/m` of `base` becomes `R/(m+1)` with the time last; `O/1`, `tau/1`
/// and `lt/2` are added, plus `succ/2` when `discrete`.
pub fn time_indexed_signature(base: &Signature, discrete: bool) -> Result<Signature> {
    if !base.is_relational() {
        return Err(Error::Unsupported("time indexing needs a relational signature".into()));
    }
    let mut sig = Signature::new(format!("{}_tau", base.name));
    for r in base.relations() {
        if [OBJECT, TIME, BEFORE, SUCC].contains(&r.name.as_str()) {
            return Err(Error::InvalidSignature(format!("`{}` is reserved in time-indexed signatures", r.name)));
        }
        sig.add_relation(&r.name, r.arity + 1)?;
    }
    sig.add_relation(OBJECT, 1)?;
    sig.add_relation(TIME, 1)?;
    sig.add_relation(BEFORE, 2)?;
    if discrete {
        sig.add_relation(SUCC, 2)?;
    }
    Ok(sig)
}

/// The universal theory of time-indexed structures: every element is exactly
/// one of object or time, relations hold only of objects at a time, and `lt`
/// is a strict linear order on the times. With `discrete`, `succ` is the
/// immediate-successor relation of `lt`.
pub fn time_indexed_theory(base: &Signature, discrete: bool) -> Result<Theory> {
    let sig = time_indexed_signature(base, discrete)?;
    let mut axioms = vec![format!("forall x. ({OBJECT}(x) | {TIME}(x)) & !({OBJECT}(x) & {TIME}(x))")];
    for r in base.relations() {
        let xs: Vec<String> = (1..=r.arity).map(|i| format!("x{i}")).collect();
        let mut vars = xs.clone();
        vars.push("t".into());
        let mut sorts: Vec<String> = xs.iter().map(|x| format!("{OBJECT}({x})")).collect();
        sorts.push(format!("{TIME}(t)"));
        axioms.push(format!("forall {}. {}({}) -> {}", vars.join(","), r.name, vars.join(","), sorts.join(" & ")));
    }
    axioms.push(format!("forall x,y. {BEFORE}(x,y) -> {TIME}(x) & {TIME}(y)"));
    axioms.push(format!("forall x. !{BEFORE}(x,x)"));
    axioms.push(format!("forall x,y,z. {BEFORE}(x,y) & {BEFORE}(y,z) -> {BEFORE}(x,z)"));
    axioms.push(format!("forall x,y. {TIME}(x) & {TIME}(y) -> x = y | {BEFORE}(x,y) | {BEFORE}(y,x)"));
    if discrete {
        axioms.push(format!("forall x,y,z. {SUCC}(x,y) -> {BEFORE}(x,y) & !({BEFORE}(x,z) & {BEFORE}(z,y))"));
    }
    let mut text = String::new();
    for a in &axioms {
        text.push_str(a);
        text.push('\n');
    }
    let parsed = Theory::parse(&sig.name, &text)?;
    let name = sig.name.clone();
    Theory::new(&name, Arc::new(sig), parsed.sentences)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sigstruct::text::parse_structure;

    fn coin() -> Signature {
        Signature::new("coin").with_relation("H", 1).unwrap()
    }

    #[test]
    fn signature_shifts_arities() {
        let sig = time_indexed_signature(&coin(), true).unwrap();
        let names: Vec<_> = sig.relations().iter().map(|r| (r.name.as_str(), r.arity)).collect();
        assert_eq!(names, [("H", 2), ("O", 1), ("tau", 1), ("lt", 2), ("succ", 2)]);
        let clash = Signature::new("b").with_relation("lt", 1).unwrap();
        assert!(time_indexed_signature(&clash, false).is_err());
    }

    #[test]
    fn two_flips_are_a_model() {
        let t = time_indexed_theory(&coin(), true).unwrap();
        let sig = t.sig.clone();
        let (_, m) = parse_structure(
            "structure m over coin_tau { dom = {c,t0,t1}; O = {c}; tau = {t0,t1}; lt = {(t0,t1)}; succ = {(t0,t1)}; H = {(c,t1)} }",
            &[sig.clone()],
        )
        .unwrap();
        assert!(t.is_model(&m).unwrap());
        let (_, bad) = parse_structure(
            "structure m over coin_tau { dom = {c,t0,t1}; O = {c}; tau = {t0,t1}; lt = {(t0,t1)}; H = {(t0,c)} }",
            &[sig],
        )
        .unwrap();
        assert!(!t.is_model(&bad).unwrap());
    }
}
