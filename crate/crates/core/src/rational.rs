//! Exact rational scalars and their textual form.
//!
//! Every coefficient in the crate is a [`Q`] (arbitrary-precision rational).
//! On the wire rationals are always written as `"p/q"` strings, including
//! integers (`"3/1"`), so that reports never contain lossy floats.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serializer};
use std::str::FromStr;

pub type Q = BigRational;

pub fn q(numer: i64, denom: i64) -> Q {
    Q::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn factorial_q(n: u32) -> Q {
    Q::from_integer(factorial(n))
}

/// Canonical `"p/q"` form (denominator always present and positive).
pub fn fmt_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Accepts `"p/q"`, `"p"` and signed variants.
pub fn parse_q(s: &str) -> Result<Q, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(num).map_err(|_| format!("invalid rational '{s}'"))?;
    let d = BigInt::from_str(den).map_err(|_| format!("invalid rational '{s}'"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in '{s}'"));
    }
    Ok(Q::new(n, d))
}

/// Lossy conversion used only for fitted slopes and float oracles.
pub fn to_f64(x: &Q) -> f64 {
    // ratio of two big ints; scale down both to keep within f64 range
    let n = x.numer();
    let d = x.denom();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let shift = (nb.max(db) - 1000).max(0);
    let nf = f64_of(&(n >> shift as usize));
    let df = f64_of(&(d >> shift as usize));
    nf / df
}

fn f64_of(b: &BigInt) -> f64 {
    b.to_string().parse::<f64>().unwrap_or(f64::NAN)
}

pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_q_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&fmt_q(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_q(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub fn q_json(x: &Q) -> serde_json::Value {
    serde_json::Value::String(fmt_q(x))
}

pub fn q_matrix_json(m: &[Vec<Q>]) -> serde_json::Value {
    serde_json::Value::Array(
        m.iter()
            .map(|row| serde_json::Value::Array(row.iter().map(q_json).collect()))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_always_with_denominator() {
        assert_eq!(fmt_q(&q(3, 1)), "3/1");
        assert_eq!(fmt_q(&q(-2, 4)), "-1/2");
        assert_eq!(parse_q("-1/2").unwrap(), q(-1, 2));
        assert_eq!(parse_q("7").unwrap(), qi(7));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn float_conversion() {
        assert!((to_f64(&q(1, 3)) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(factorial(5), BigInt::from(120));
    }
}
