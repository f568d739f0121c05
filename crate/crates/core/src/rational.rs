//! Exact rationals and a few helpers shared by every module.

use alloc::string::{String, ToString};
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::invalid;
use crate::Result;

/// Arbitrary precision rational, always reduced with a positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"num/den"` or an integer.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let parsed = match text.split_once('/') {
        Some((num, den)) => {
            let num = BigInt::from_str(num.trim()).map_err(|_| invalid!("bad rational {text:?}"))?;
            let den = BigInt::from_str(den.trim()).map_err(|_| invalid!("bad rational {text:?}"))?;
            if den.is_zero() {
                return Err(invalid!("zero denominator in {text:?}"));
            }
            Rational::new(num, den)
        }
        None => Rational::from_integer(
            BigInt::from_str(text).map_err(|_| invalid!("bad rational {text:?}"))?,
        ),
    };
    Ok(parsed)
}

/// Formats as `"num/den"`, or `"num"` for integers.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

pub fn is_positive(value: &Rational) -> bool {
    value.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("2/6").unwrap(), rat(1, 3));
        assert_eq!(parse_rational(" -4 ").unwrap(), int(-4));
        assert_eq!(format_rational(&rat(2, 4)), "1/2");
        assert_eq!(format_rational(&int(3)), "3");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn denominators_stay_positive() {
        let r = rat(1, -3);
        assert_eq!(format_rational(&r), "-1/3");
    }
}
