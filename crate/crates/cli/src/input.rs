//! Parsing of matrix arguments, ranges and rational lists.
//!
//! A matrix argument is either inline JSON or a path to a JSON file. Two
//! shapes are accepted: the full serialized Gram matrix object (which carries
//! its own local context), or a bare nested array whose entries are integers,
//! "a/b" strings, or [a, b] pairs meaning a + b·δ.

use hermlab_core::arith::{parse_rat, Rat};
use hermlab_core::assembly::GlobalGram;
use hermlab_core::field_data::LocalQuadExt;
use hermlab_core::hermitian::{FieldElement, GramJson, GramMatrix};
use hermlab_core::{Error, Result};
use serde_json::Value;
use std::path::Path;

fn load(arg: &str) -> Result<Value> {
    let text = if Path::new(arg).is_file() {
        std::fs::read_to_string(arg).map_err(|e| Error::InvalidInput(format!("{arg}: {e}")))?
    } else {
        arg.to_string()
    };
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("malformed JSON: {e}")))
}

fn scalar(v: &Value) -> Result<Rat> {
    let bad = || Error::InvalidInput(format!("not an exact rational: {v}"));
    match v {
        Value::Number(n) => n.as_i64().map(|n| Rat::from_integer(n.into())).ok_or_else(bad),
        Value::String(s) => parse_rat(s).ok_or_else(bad),
        _ => Err(bad()),
    }
}

fn field_entry(v: &Value) -> Result<FieldElement> {
    match v {
        Value::Array(pair) if pair.len() == 2 => Ok(FieldElement::new(scalar(&pair[0])?, scalar(&pair[1])?)),
        Value::Array(_) => Err(Error::InvalidInput(format!("entry {v} must be a number or an [a, b] pair"))),
        _ => Ok(FieldElement::from_rat(scalar(v)?)),
    }
}

fn rows(v: &Value) -> Result<&Vec<Value>> {
    v.as_array().ok_or_else(|| Error::InvalidInput(format!("expected a nested array, got {v}")))
}

/// A local Gram matrix. `ext` is used unless the JSON carries its own context.
pub fn gram(arg: &str, ext: Option<LocalQuadExt>) -> Result<GramMatrix> {
    let v = load(arg)?;
    if v.is_object() {
        let j: GramJson = serde_json::from_value(v).map_err(|e| Error::InvalidInput(format!("bad Gram matrix object: {e}")))?;
        return GramMatrix::from_json(&j);
    }
    let ext = ext.ok_or_else(|| Error::InvalidInput("a bare matrix needs --p and --splitting (or --delta)".into()))?;
    let entries = rows(&v)?
        .iter()
        .map(|r| rows(r)?.iter().map(field_entry).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    GramMatrix::new(ext, entries)
}

/// A global rational symmetric matrix.
pub fn global_gram(arg: &str) -> Result<GlobalGram> {
    let v = load(arg)?;
    let entries = rows(&v)?
        .iter()
        .map(|r| rows(r)?.iter().map(scalar).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    GlobalGram::new(entries)
}

/// "a..b" or "a..=b", both inclusive; b < a is the empty range.
pub fn range(s: &str) -> Result<std::ops::RangeInclusive<u64>> {
    let bad = || Error::InvalidInput(format!("bad range {s:?}, expected a..b"));
    if let Ok(j) = s.trim().parse::<u64>() {
        return Ok(j..=j);
    }
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    Ok(a..=b)
}

/// Comma-separated rationals; decimals like 0.25 are read exactly.
pub fn rationals(s: &str) -> Result<Vec<Rat>> {
    s.split(',').map(|x| rational(x.trim())).collect()
}

pub fn rational(s: &str) -> Result<Rat> {
    if let Some(r) = parse_rat(s) {
        return Ok(r);
    }
    let bad = || Error::InvalidInput(format!("not a number: {s:?}"));
    let (neg, body) = s.strip_prefix('-').map_or((false, s), |b| (true, b));
    let (int, frac) = body.split_once('.').ok_or_else(bad)?;
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || int.len() + frac.len() == 0 {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let den = format!("1{}", "0".repeat(frac.len()));
    let r = parse_rat(&format!("{digits}/{den}")).ok_or_else(bad)?;
    Ok(if neg { -r } else { r })
}
