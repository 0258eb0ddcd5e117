//! Numeric keys for external input: decimal integers and finite floats,
//! compared by numeric value. Ties (including 1 vs 1.0) are broken by origin
//! index through the element normalization in [`crate::primitives`].

use crate::error::{Error, Result};
use crate::primitives::Sequence;
use serde::Serializer;
use std::cmp::Ordering;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NumKey {
    Int(i64),
    Float(f64),
}

// No NaN by construction (rejected at parse), so the order is total.
impl Eq for NumKey {}

impl Ord for NumKey {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (NumKey::Int(a), NumKey::Int(b)) => a.cmp(b),
            (NumKey::Float(a), NumKey::Float(b)) => {
                a.partial_cmp(b).expect("finite by construction")
            }
            (NumKey::Int(a), NumKey::Float(b)) => cmp_int_float(*a, *b),
            (NumKey::Float(a), NumKey::Int(b)) => cmp_int_float(*b, *a).reverse(),
        }
    }
}

impl PartialOrd for NumKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Exact comparison of an i64 against a finite f64: compare against the
// float's floor, which is exactly representable as i64 within range.
fn cmp_int_float(x: i64, y: f64) -> Ordering {
    if y >= i64::MAX as f64 {
        return Ordering::Less;
    }
    if y < i64::MIN as f64 {
        return Ordering::Greater;
    }
    let floor = y.floor();
    match x.cmp(&(floor as i64)) {
        Ordering::Equal => {
            if y > floor {
                Ordering::Less
            } else {
                Ordering::Equal
            }
        }
        other => other,
    }
}

impl fmt::Display for NumKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumKey::Int(v) => write!(f, "{v}"),
            NumKey::Float(v) => write!(f, "{v}"),
        }
    }
}

impl serde::Serialize for NumKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NumKey::Int(v) => serializer.serialize_i64(*v),
            NumKey::Float(v) => serializer.serialize_f64(*v),
        }
    }
}

fn parse_token(token: &str) -> Result<NumKey> {
    if let Ok(v) = token.parse::<i64>() {
        return Ok(NumKey::Int(v));
    }
    let v: f64 = token
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: {token:?}")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("not a finite number: {token:?}")));
    }
    Ok(NumKey::Float(v))
}

/// Parses numbers separated by commas, whitespace, or newlines. Used for
/// both inline `--data` lists and input files (one number per line).
pub fn parse_keys(text: &str) -> Result<Vec<NumKey>> {
    let mut keys = Vec::new();
    for token in text.split(|c: char| c == ',' || c.is_whitespace()) {
        if token.is_empty() {
            continue;
        }
        keys.push(parse_token(token)?);
    }
    if keys.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(keys)
}

pub fn parse_sequence(text: &str) -> Result<Sequence<NumKey>> {
    Ok(Sequence::from_keys(parse_keys(text)?))
}
