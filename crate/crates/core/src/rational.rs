//! Exact rational scalars.
//!
//! Every price, probability and holding in the workbench is a
//! [`Rational`]: an arbitrary-precision fraction kept in lowest terms with a
//! positive denominator. Values are rendered as `"p/q"` (or `"p"` when the
//! denominator is one) and never as decimals.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("malformed rational `{0}`")]
    Malformed(String),
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p"`, `"p/q"` or a finite decimal such as `"-0.25"`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let malformed = || ParseRationalError::Malformed(s.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| malformed())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| malformed())?;
        if den.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(s.to_string()));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !whole_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        let digits = format!("{whole_digits}{frac}");
        let mut num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
            .map_err(|_| malformed())?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(num, den));
    }
    BigInt::from_str(s)
        .map(Rational::from_integer)
        .map_err(|_| malformed())
}

pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

pub fn is_nonnegative(value: &Rational) -> bool {
    !value.is_negative()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn zero() -> Rational {
    Rational::zero()
}

/// Serde adapter for a single rational serialized as a `"p/q"` string.
pub mod serde_str {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
        let raw = RawRational::deserialize(deserializer)?;
        raw.into_rational().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a sequence of rationals.
pub mod serde_vec {
    use super::*;

    pub fn serialize<S: Serializer>(values: &[Rational], serializer: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<String> = values.iter().map(format_rational).collect();
        strings.serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<RawRational>::deserialize(deserializer)?;
        raw.into_iter()
            .map(|r| r.into_rational().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Accepts either a JSON string (`"1/2"`) or a JSON integer.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum RawRational {
    Text(String),
    Integer(i64),
}

impl RawRational {
    pub fn into_rational(self) -> Result<Rational, ParseRationalError> {
        match self {
            RawRational::Text(s) => parse_rational(&s),
            RawRational::Integer(n) => Ok(int(n)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_rational("1/2").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("-6/4").unwrap(), ratio(-3, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), int(7));
        assert_eq!(parse_rational("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), ratio(-3, 2));
    }

    #[test]
    fn rejects_zero_denominator() {
        assert_eq!(
            parse_rational("1/0"),
            Err(ParseRationalError::ZeroDenominator("1/0".into()))
        );
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_rational("").is_err());
        assert!(parse_rational("a/2").is_err());
        assert!(parse_rational("1.").is_err());
        assert!(parse_rational("1/2/3").is_err());
    }

    #[test]
    fn lowest_terms_and_formatting() {
        let r = ratio(10, -4);
        assert_eq!(format_rational(&r), "-5/2");
        assert_eq!(format_rational(&int(3)), "3");
        assert!(r.denom() > &BigInt::zero());
    }
}
