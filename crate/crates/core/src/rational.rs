//! Exact rational scalars and their textual form.
//!
//! Every quantity in the crate is a `BigRational`; nothing is ever rounded.
//! The canonical text form is `p/q` in lowest terms, or plain `p` when the
//! denominator is one.

use num::bigint::BigInt;
use num::{BigRational, One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p`, `-p`, `p/q`. Non-reduced input is normalized.
pub fn parse_rational(text: &str) -> Option<Q> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Q::new(num, den))
}

pub fn format_rational(value: &Q) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// `base^exp` for a possibly negative exponent.
pub fn pow(base: &Q, exp: i64) -> Q {
    if exp >= 0 {
        num::pow::pow(base.clone(), exp as usize)
    } else {
        num::pow::pow(base.recip(), exp.unsigned_abs() as usize)
    }
}

/// Least common multiple of the denominators, i.e. the smallest positive
/// integer `t` with `t * v` integral for every `v`.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Q>) -> BigInt {
    let mut acc = BigInt::one();
    for v in values {
        acc = num::integer::lcm(acc, v.denom().clone());
    }
    acc
}

pub fn abs(value: &Q) -> Q {
    value.abs()
}

pub mod serde_q {
    //! Serializes rationals as `"p/q"` strings.
    use super::{format_rational, parse_rational, Q};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).ok_or_else(|| serde::de::Error::custom(format!("bad rational {text:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_normalizes() {
        assert_eq!(parse_rational("-2/1"), Some(q(-2)));
        assert_eq!(parse_rational("6/-4"), Some(frac(-3, 2)));
        assert_eq!(parse_rational(" 7 "), Some(q(7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn format_is_lowest_terms() {
        assert_eq!(format_rational(&frac(4, 8)), "1/2");
        assert_eq!(format_rational(&frac(-10, 5)), "-2");
        assert_eq!(format_rational(&q(0)), "0");
    }

    #[test]
    fn negative_powers() {
        assert_eq!(pow(&q(3), -2), frac(1, 9));
        assert_eq!(pow(&frac(1, 2), 3), frac(1, 8));
        assert_eq!(pow(&q(5), 0), q(1));
    }

    #[test]
    fn lcm_of_denominators() {
        let vals = [frac(1, 2), frac(1, 3), q(4)];
        assert_eq!(common_denominator(vals.iter()), BigInt::from(6));
    }
}
