//! Exact rational scalars.
//!
//! `Scalar` is GMP's rational type; it is always kept in lowest terms with a
//! positive denominator. JSON uses the string form `"num/den"`.

use rug::{Integer, Rational};
use std::fmt;

pub type Scalar = Rational;

/// Convenience queries missing from `Rational`.
pub trait ScalarExt {
    fn is_zero(&self) -> bool;
}

impl ScalarExt for Rational {
    #[inline]
    fn is_zero(&self) -> bool {
        self.cmp0() == std::cmp::Ordering::Equal
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse scalar from {0:?}")]
pub struct ParseScalarError(pub String);

/// Parses `"a"`, `"a/b"` or a terminating decimal such as `"-0.25"`.
pub fn parse_scalar(s: &str) -> Result<Scalar, ParseScalarError> {
    let t = s.trim();
    let err = || ParseScalarError(s.to_string());
    if t.is_empty() {
        return Err(err());
    }
    if let Some((int, frac)) = t.split_once('.') {
        if t.contains('/') || frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let n = Integer::from_str_radix(&digits, 10).map_err(|_| err())?;
        let d = Integer::from(Integer::u_pow_u(10, frac.len() as u32));
        let q = Rational::from((n, d));
        return Ok(if neg { -q } else { q });
    }
    let q: Rational = t.parse().map_err(|_| err())?;
    Ok(q)
}

/// Always `num/den`, integers included.
pub fn format_scalar(q: &Scalar) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn int(n: i64) -> Scalar {
    Rational::from(n)
}

pub fn frac(n: i64, d: i64) -> Scalar {
    Rational::from((n, d))
}

pub fn binomial(n: u32, k: u32) -> Integer {
    if k > n {
        return Integer::new();
    }
    Integer::from(Integer::binomial_u(n, k))
}

pub fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

/// Wrapper giving `Display` in the `num/den` JSON form.
pub struct Show<'a>(pub &'a Scalar);

impl fmt::Display for Show<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_scalar(self.0))
    }
}

/// serde adapters (`#[serde(with = "crate::scalar::serde_scalar")]`).
pub mod serde_scalar {
    use super::*;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Scalar, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_scalar(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        from_value(&v).map_err(D::Error::custom)
    }

    /// Accepts a JSON string or a JSON integer.
    pub fn from_value(v: &serde_json::Value) -> Result<Scalar, String> {
        match v {
            serde_json::Value::String(s) => parse_scalar(s).map_err(|e| e.to_string()),
            serde_json::Value::Number(n) if n.is_i64() => Ok(int(n.as_i64().unwrap())),
            other => Err(format!("expected scalar string, got {other}")),
        }
    }
}

pub mod serde_scalar_vec {
    use super::*;
    use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Scalar], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&format_scalar(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Scalar>, D::Error> {
        let v = Vec::<serde_json::Value>::deserialize(d)?;
        v.iter()
            .map(|x| serde_scalar::from_value(x).map_err(D::Error::custom))
            .collect()
    }
}

pub mod serde_scalar_matrix {
    use super::*;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &[Vec<Scalar>], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = m
            .iter()
            .map(|r| r.iter().map(format_scalar).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Scalar>>, D::Error> {
        let v = Vec::<Vec<serde_json::Value>>::deserialize(d)?;
        v.iter()
            .map(|r| {
                r.iter()
                    .map(|x| serde_scalar::from_value(x).map_err(D::Error::custom))
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_scalar("3").unwrap(), int(3));
        assert_eq!(parse_scalar("-6/4").unwrap(), frac(-3, 2));
        assert_eq!(parse_scalar("0.25").unwrap(), frac(1, 4));
        assert_eq!(parse_scalar("-1.5").unwrap(), frac(-3, 2));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
        assert!(parse_scalar("").is_err());
    }

    #[test]
    fn format_is_lowest_terms() {
        assert_eq!(format_scalar(&frac(4, -6)), "-2/3");
        assert_eq!(format_scalar(&int(5)), "5/1");
        assert_eq!(format_scalar(&int(0)), "0/1");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(2, 5), 0);
        assert_eq!(factorial(5), 120);
    }
}
