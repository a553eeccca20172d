//! JSON encodings of exact values.
//!
//! Integers are JSON numbers when they fit in an `i64` and decimal strings
//! otherwise. Rationals are always strings `"p/q"` (or `"p"` when integral)
//! in lowest terms.

use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{Int, IntLattice, IntMatrix, IntPoly, Rat, RatMatrix};

pub fn int(x: &Int) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => Value::String(x.to_string()),
    }
}

pub fn parse_int(v: &Value) -> Result<Int> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(Int::from)
            .ok_or_else(|| Error::InvalidInput(format!("not an integer: {n}"))),
        Value::String(s) => s
            .trim()
            .parse::<Int>()
            .map_err(|_| Error::InvalidInput(format!("not an integer: {s:?}"))),
        other => Err(Error::InvalidInput(format!("not an integer: {other}"))),
    }
}

pub fn rat(x: &Rat) -> Value {
    Value::String(x.to_string())
}

pub fn parse_rat_str(s: &str) -> Result<Rat> {
    let bad = || Error::InvalidInput(format!("not a rational \"p/q\": {s:?}"));
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: Int = p.parse().map_err(|_| bad())?;
    let q: Int = q.parse().map_err(|_| bad())?;
    if q == Int::from(0) {
        return Err(Error::InvalidInput(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(p, q))
}

pub fn parse_rat(v: &Value) -> Result<Rat> {
    match v {
        Value::String(s) => parse_rat_str(s),
        Value::Number(n) if n.is_i64() => Ok(Rat::from_integer(Int::from(n.as_i64().unwrap_or(0)))),
        other => Err(Error::InvalidInput(format!(
            "rationals must be strings \"p/q\": {other}"
        ))),
    }
}

pub fn int_vec(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

pub fn rat_vec(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(rat).collect())
}

pub fn int_matrix(m: &IntMatrix) -> Value {
    Value::Array(m.to_row_vecs().iter().map(|r| int_vec(r)).collect())
}

pub fn rat_matrix(m: &RatMatrix) -> Value {
    Value::Array(m.to_row_vecs().iter().map(|r| rat_vec(r)).collect())
}

pub fn parse_int_matrix(v: &Value) -> Result<IntMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::InvalidInput("matrix must be an array of rows".into()))?;
    let rows: Vec<Vec<Int>> = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::InvalidInput("matrix row must be an array".into()))?
                .iter()
                .map(parse_int)
                .collect()
        })
        .collect::<Result<_>>()?;
    IntMatrix::from_row_vecs(rows)
}

pub fn parse_rat_matrix(v: &Value) -> Result<RatMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::InvalidInput("matrix must be an array of rows".into()))?;
    let rows: Vec<Vec<Rat>> = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::InvalidInput("matrix row must be an array".into()))?
                .iter()
                .map(parse_rat)
                .collect()
        })
        .collect::<Result<_>>()?;
    RatMatrix::from_row_vecs(rows)
}

/// Coefficients lowest degree first.
pub fn poly(p: &IntPoly) -> Value {
    int_vec(p.coeffs())
}

pub fn lattice(l: &IntLattice) -> Value {
    json!({
        "ambient_dim": l.ambient_dim(),
        "rank": l.rank(),
        "basis": Value::Array(l.basis_vectors().iter().map(|v| int_vec(v)).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_are_reduced() {
        let r = parse_rat_str("6/-4").unwrap();
        assert_eq!(rat(&r), json!("-3/2"));
        assert_eq!(rat(&parse_rat_str("4/2").unwrap()), json!("2"));
        assert!(parse_rat_str("1/0").is_err());
        assert!(parse_rat_str("abc").is_err());
    }

    #[test]
    fn big_integers_become_strings() {
        let big: Int = "123456789012345678901234567890".parse().unwrap();
        let v = int(&big);
        assert!(v.is_string());
        assert_eq!(parse_int(&v).unwrap(), big);
        assert_eq!(int(&Int::from(-7)), json!(-7));
    }
}
