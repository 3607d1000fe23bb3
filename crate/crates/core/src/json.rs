//! JSON schemas for the exchange types.
//!
//! Matrices: `{"matrix": [[1, "-3/2"], ["2/3", 0]]}` or the bare 2D array;
//! integer entries as JSON numbers, rationals as strings `"p/q"` (floats are
//! rejected to keep the arithmetic exact). Fans:
//! `{"rays": [[1,0],[0,1],...], "max_cones": [[0,1],...]}`. Divisors:
//! `{"coeffs": ["2", "1", "2"]}` or the bare array, aligned with the fan's
//! ray order. The Unicode minus sign is accepted everywhere.

use crate::divisor::TWeilDivisor;
use crate::fan::{Fan, FanError};
use crate::matrix::{IntMatrix, RatMatrix};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::Value;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub enum JsonError {
    Syntax(String),
    Schema(String),
    Fan(String),
}

impl fmt::Display for JsonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JsonError::Syntax(msg) => write!(f, "invalid JSON: {msg}"),
            JsonError::Schema(msg) => write!(f, "schema error: {msg}"),
            JsonError::Fan(msg) => write!(f, "invalid fan: {msg}"),
        }
    }
}

impl std::error::Error for JsonError {}

impl From<FanError> for JsonError {
    fn from(e: FanError) -> Self {
        JsonError::Fan(e.to_string())
    }
}

fn normalize_minus(text: &str) -> String {
    text.replace('\u{2212}', "-")
}

fn parse_value(text: &str) -> Result<Value, JsonError> {
    serde_json::from_str(&normalize_minus(text)).map_err(|e| JsonError::Syntax(e.to_string()))
}

/// A scalar entry: JSON integer or a string `"p"` / `"p/q"`.
fn rational_entry(v: &Value) -> Result<BigRational, JsonError> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(BigInt::from(i)))
            } else if let Some(u) = n.as_u64() {
                Ok(BigRational::from_integer(BigInt::from(u)))
            } else {
                Err(JsonError::Schema(format!(
                    "entry {n} is not an integer; write rationals as strings \"p/q\""
                )))
            }
        }
        Value::String(s) => parse_rational_str(s),
        other => Err(JsonError::Schema(format!(
            "expected an integer or a \"p/q\" string, found {other}"
        ))),
    }
}

/// Parse `"p"` or `"p/q"` into a rational.
pub fn parse_rational_str(s: &str) -> Result<BigRational, JsonError> {
    let s = normalize_minus(s.trim());
    let (num, den) = match s.split_once('/') {
        None => (s.as_str(), "1"),
        Some((n, d)) => (n, d),
    };
    let n = BigInt::from_str(num.trim())
        .map_err(|_| JsonError::Schema(format!("bad numerator in rational `{s}`")))?;
    let d = BigInt::from_str(den.trim())
        .map_err(|_| JsonError::Schema(format!("bad denominator in rational `{s}`")))?;
    if d.is_zero() {
        return Err(JsonError::Schema(format!("zero denominator in `{s}`")));
    }
    Ok(BigRational::new(n, d))
}

fn rows_from(v: &Value) -> Result<Vec<Vec<BigRational>>, JsonError> {
    let rows = v
        .as_array()
        .ok_or_else(|| JsonError::Schema("matrix must be an array of rows".into()))?;
    rows.iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| JsonError::Schema("matrix row must be an array".into()))?
                .iter()
                .map(rational_entry)
                .collect()
        })
        .collect()
}

/// Parse a rational matrix from `{"matrix": rows}` or bare rows.
pub fn parse_matrix_json(text: &str) -> Result<RatMatrix, JsonError> {
    let value = parse_value(text)?;
    let rows_value = match &value {
        Value::Object(map) => map
            .get("matrix")
            .ok_or_else(|| JsonError::Schema("missing \"matrix\" key".into()))?,
        other => other,
    };
    let rows = rows_from(rows_value)?;
    RatMatrix::new(rows).map_err(|e| JsonError::Schema(e.to_string()))
}

/// Parse an integer matrix, rejecting fractional entries.
pub fn parse_int_matrix_json(text: &str) -> Result<IntMatrix, JsonError> {
    let m = parse_matrix_json(text)?;
    m.to_int().ok_or_else(|| {
        JsonError::Schema("matrix must have integer entries for this operation".into())
    })
}

/// Parse a fan from `{"rays": [[...]], "max_cones": [[...]]}`.
pub fn parse_fan_json(text: &str) -> Result<Fan, JsonError> {
    let value = parse_value(text)?;
    let obj = value
        .as_object()
        .ok_or_else(|| JsonError::Schema("fan must be an object".into()))?;
    let rays_v = obj
        .get("rays")
        .ok_or_else(|| JsonError::Schema("missing \"rays\" key".into()))?;
    let cones_v = obj
        .get("max_cones")
        .ok_or_else(|| JsonError::Schema("missing \"max_cones\" key".into()))?;
    let rays = rows_from(rays_v)?
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|r| {
                    if r.denom().is_one() {
                        Ok(r.to_integer())
                    } else {
                        Err(JsonError::Schema("ray entries must be integers".into()))
                    }
                })
                .collect::<Result<Vec<BigInt>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let max_cones = cones_v
        .as_array()
        .ok_or_else(|| JsonError::Schema("\"max_cones\" must be an array".into()))?
        .iter()
        .map(|cone| {
            cone.as_array()
                .ok_or_else(|| JsonError::Schema("cone must be an array of ray indices".into()))?
                .iter()
                .map(|i| {
                    i.as_u64()
                        .map(|x| x as usize)
                        .ok_or_else(|| JsonError::Schema("ray index must be a nonnegative integer".into()))
                })
                .collect::<Result<Vec<usize>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Fan::new(rays, max_cones)?)
}

/// Parse a divisor on the given fan from `{"coeffs": [...]}` or a bare array.
pub fn parse_divisor_json(text: &str, fan: &Arc<Fan>) -> Result<TWeilDivisor, JsonError> {
    let value = parse_value(text)?;
    let coeffs_v = match &value {
        Value::Object(map) => map
            .get("coeffs")
            .ok_or_else(|| JsonError::Schema("missing \"coeffs\" key".into()))?,
        other => other,
    };
    let coeffs = coeffs_v
        .as_array()
        .ok_or_else(|| JsonError::Schema("coefficients must be an array".into()))?
        .iter()
        .map(rational_entry)
        .collect::<Result<Vec<_>, _>>()?;
    TWeilDivisor::new(fan.clone(), coeffs).map_err(|e| JsonError::Schema(e.to_string()))
}

// ---------------------------------------------------------------------------
// Output builders
// ---------------------------------------------------------------------------

/// `"p/q"` for proper rationals, plain decimal string for integers.
pub fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Integer as a JSON number when it fits, else a decimal string.
pub fn bigint_to_value(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => Value::from(v),
        None => Value::from(x.to_string()),
    }
}

pub fn rational_to_value(r: &BigRational) -> Value {
    if r.denom().is_one() {
        bigint_to_value(r.numer())
    } else {
        Value::from(rational_to_string(r))
    }
}

pub fn int_matrix_to_value(m: &IntMatrix) -> Value {
    Value::from(
        m.rows()
            .map(|row| Value::from(row.iter().map(bigint_to_value).collect::<Vec<_>>()))
            .collect::<Vec<_>>(),
    )
}

pub fn rat_matrix_to_value(m: &RatMatrix) -> Value {
    Value::from(
        (0..m.n_rows())
            .map(|i| {
                Value::from(
                    m.row(i)
                        .iter()
                        .map(rational_to_value)
                        .collect::<Vec<_>>(),
                )
            })
            .collect::<Vec<_>>(),
    )
}

pub fn fan_to_value(fan: &Fan) -> Value {
    serde_json::json!({
        "rays": fan
            .rays()
            .iter()
            .map(|r| Value::from(r.iter().map(bigint_to_value).collect::<Vec<_>>()))
            .collect::<Vec<_>>(),
        "max_cones": fan
            .max_cones()
            .iter()
            .map(|c| Value::from(c.indices().to_vec()))
            .collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip_forms() {
        let wrapped = parse_matrix_json(r#"{"matrix": [[1, "-3/2"], ["2/3", 0]]}"#).unwrap();
        let bare = parse_matrix_json(r#"[[1, "-3/2"], ["2/3", 0]]"#).unwrap();
        assert_eq!(wrapped, bare);
        assert_eq!(
            *wrapped.entry(0, 1),
            BigRational::new(BigInt::from(-3), BigInt::from(2))
        );
    }

    #[test]
    fn unicode_minus_in_matrices() {
        let m = parse_int_matrix_json("[[\u{2212}1,\u{2212}2],[2,0]]").unwrap();
        assert_eq!(m, IntMatrix::from_i64(&[&[-1, -2], &[2, 0]]));
    }

    #[test]
    fn floats_rejected() {
        let err = parse_matrix_json("[[1.5, 0], [0, 1]]").unwrap_err();
        assert!(matches!(err, JsonError::Schema(_)));
    }

    #[test]
    fn int_matrix_rejects_fractions() {
        assert!(parse_int_matrix_json(r#"[["1/2"]]"#).is_err());
    }

    #[test]
    fn fan_parse_and_serialize() {
        let text = r#"{"rays": [[1,0],[0,1],[-1,-1]], "max_cones": [[0,1],[0,2],[1,2]]}"#;
        let fan = parse_fan_json(text).unwrap();
        assert!(fan.is_complete());
        let value = fan_to_value(&fan);
        let round = parse_fan_json(&value.to_string()).unwrap();
        assert_eq!(fan.rays(), round.rays());
        assert_eq!(fan.max_cones(), round.max_cones());
    }

    #[test]
    fn divisor_parse() {
        let fan = Arc::new(Fan::projective(2).unwrap());
        let d = parse_divisor_json(r#"{"coeffs": ["2", 1, "2"]}"#, &fan).unwrap();
        assert_eq!(
            d.coeffs(),
            &[
                BigRational::from_integer(BigInt::from(2)),
                BigRational::from_integer(BigInt::from(1)),
                BigRational::from_integer(BigInt::from(2)),
            ]
        );
        // Count mismatch surfaces as a schema error.
        assert!(parse_divisor_json("[1, 2]", &fan).is_err());
    }

    #[test]
    fn rational_strings() {
        assert_eq!(
            rational_to_string(&BigRational::new(BigInt::from(13), BigInt::from(6))),
            "13/6"
        );
        assert_eq!(
            rational_to_string(&BigRational::from_integer(BigInt::from(-5))),
            "-5"
        );
    }
}
