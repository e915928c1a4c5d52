//! Exact rationals as `"p/q"` strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub fn ratio(p: impl Into<BigInt>, q: impl Into<BigInt>) -> BigRational {
    BigRational::new(p.into(), q.into())
}

pub fn integer(p: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(p.into())
}

/// Always `"p/q"`, reduced, with a positive denominator (`"3/1"` for 3).
pub fn format(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `"p/q"`, integers and decimals such as `"2.5"` or `"-0.125"`,
/// all parsed exactly.
pub fn parse(text: &str) -> Result<BigRational> {
    let bad = || Error::InvalidArgument(format!("not a rational number: {text:?}"));
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    let denom = (0..frac.len()).fold(BigInt::one(), |acc, _| acc * 10);
    let value = BigRational::new(numer, denom);
    Ok(if negative { -value } else { value })
}

/// Serde adapter for a `BigRational` stored as `"p/q"`.
pub mod as_string {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        super::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for an optional `BigRational`.
pub mod as_optional_string {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_str(&super::format(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        Option::<String>::deserialize(d)?.map(|t| super::parse(&t).map_err(serde::de::Error::custom)).transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse("5/2").unwrap(), ratio(5, 2));
        assert_eq!(parse("2.5").unwrap(), ratio(5, 2));
        assert_eq!(parse("0.9").unwrap(), ratio(9, 10));
        assert_eq!(parse("-0.125").unwrap(), ratio(-1, 8));
        assert_eq!(parse("10").unwrap(), integer(10));
        assert_eq!(parse(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse("6/4").unwrap(), ratio(3, 2));
        for bad in ["", "1/0", "abc", "1.2.3", "-", "."] {
            assert!(parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn formats_reduced() {
        assert_eq!(format(&ratio(-6, 16)), "-3/8");
        assert_eq!(format(&integer(3)), "3/1");
    }

    proptest! {
        #[test]
        fn format_parse_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
            let r = ratio(p, q);
            prop_assert_eq!(parse(&format(&r)).unwrap(), r);
        }
    }
}
