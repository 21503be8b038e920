use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Coefficient field for formal series: exact rationals or floats.
pub trait Scalar: Clone + Debug + PartialEq + PartialOrd + Num + Signed + Send + Sync {
    const EXACT: bool;
    fn from_ratio(p: i64, q: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn to_text(&self) -> String;

    fn from_i64(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(p: i64, q: i64) -> Self {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    fn to_f64(&self) -> f64 {
        // numerator and denominator may overflow f64 separately
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            let shift = self.numer().bits().max(self.denom().bits()).saturating_sub(1000) as usize;
            let n = (self.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (self.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }

    fn to_text(&self) -> String {
        self.to_string()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(p: i64, q: i64) -> Self {
        p as f64 / q as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_text(&self) -> String {
        format!("{self:e}")
    }
}

/// Parses an integer, a fraction `p/q`, or a decimal with optional
/// exponent into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::param("sequence", format!("`{t}` is not a rational number"));
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::param("sequence", format!("`{t}` has a zero denominator")));
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !(int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())) {
        return Err(bad());
    }
    let all = format!("{int}{frac}");
    let mut value = BigRational::from_integer(all.parse::<BigInt>().map_err(|_| bad())?);
    let scale = exponent - frac.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let factor = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    Ok(if negative { -value } else { value })
}

/// Comma-separated rationals, or a JSON array of numbers or strings.
pub fn parse_rational_list(text: &str) -> Result<Vec<BigRational>> {
    let t = text.trim();
    if t.starts_with('[') {
        let value: serde_json::Value =
            serde_json::from_str(t).map_err(|e| Error::param("sequence", format!("invalid JSON: {e}")))?;
        let items = value.as_array().ok_or_else(|| Error::param("sequence", "expected a JSON array"))?;
        return items
            .iter()
            .map(|v| match v {
                serde_json::Value::Number(n) => parse_rational(&n.to_string()),
                serde_json::Value::String(s) => parse_rational(s),
                other => Err(Error::param("sequence", format!("unexpected JSON entry {other}"))),
            })
            .collect();
    }
    if t.is_empty() {
        return Ok(Vec::new());
    }
    t.split(',').map(parse_rational).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::from_ratio(p, d)
    }

    #[test]
    fn parses_exactly() {
        assert_eq!(parse_rational("1/2").unwrap(), q(1, 2));
        assert_eq!(parse_rational("0.25").unwrap(), q(1, 4));
        assert_eq!(parse_rational("-0.1").unwrap(), q(-1, 10));
        assert_eq!(parse_rational("1e-3").unwrap(), q(1, 1000));
        assert_eq!(parse_rational("2.5E2").unwrap(), q(250, 1));
        assert_eq!(parse_rational(" 7 ").unwrap(), q(7, 1));
        for bad in ["", "1/0", "abc", ".", "1.2.3", "--1"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn parses_lists() {
        let expect = vec![q(1, 1), q(1, 2), q(1, 4)];
        assert_eq!(parse_rational_list("1, 1/2, 0.25").unwrap(), expect);
        assert_eq!(parse_rational_list("[1, \"1/2\", 0.25]").unwrap(), expect);
        assert!(parse_rational_list("[1, null]").is_err());
        assert!(parse_rational_list("").unwrap().is_empty());
    }

    #[test]
    fn huge_rationals_convert() {
        let big = num_traits::pow(q(3, 2), 3000);
        let f = Scalar::to_f64(&big);
        assert!(f.is_infinite() || f > 1e300);
        let tiny = num_traits::pow(q(2, 3), 3000) * num_traits::pow(q(3, 2), 2999);
        assert!((Scalar::to_f64(&tiny) - 2.0 / 3.0).abs() < 1e-12);
    }
}
