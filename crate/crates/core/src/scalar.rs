//! Exact rational scalars and small combinatorial helpers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// The coefficient field: arbitrary-precision rationals.
pub type Scalar = BigRational;

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

pub fn from_i64(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Scalar {
    assert!(den != 0, "zero denominator");
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

/// `k!` as a scalar.
pub fn factorial(k: usize) -> Scalar {
    let mut acc = BigInt::one();
    for i in 2..=k {
        acc *= BigInt::from(i);
    }
    Scalar::from_integer(acc)
}

/// `1 / k!`.
pub fn inv_factorial(k: usize) -> Scalar {
    one() / factorial(k)
}

/// Binomial coefficient as a scalar.
pub fn binomial(n: usize, k: usize) -> Scalar {
    if k > n {
        return zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    Scalar::from_integer(num / den)
}

/// Parse `num/den` or a bare integer, with an optional leading sign.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let s = text.trim();
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num_str
        .parse()
        .map_err(|_| Error::input(format!("invalid rational numerator {num_str:?}")))?;
    let den: BigInt = den_str
        .parse()
        .map_err(|_| Error::input(format!("invalid rational denominator {den_str:?}")))?;
    if den.is_zero() {
        return Err(Error::input(format!("zero denominator in {s:?}")));
    }
    Ok(Scalar::new(num, den))
}

/// Canonical `num/den` form with positive denominator, e.g. `-1/2`, `3/1`.
pub fn format_scalar(x: &Scalar) -> String {
    let (mut num, mut den) = (x.numer().clone(), x.denom().clone());
    if den.is_negative() {
        num = -num;
        den = -den;
    }
    format!("{num}/{den}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials_and_binomials() {
        assert_eq!(factorial(0), one());
        assert_eq!(factorial(4), from_i64(24));
        assert_eq!(inv_factorial(3), ratio(1, 6));
        assert_eq!(binomial(5, 2), from_i64(10));
        assert_eq!(binomial(3, 5), zero());
    }

    #[test]
    fn parse_and_format_round_trip() {
        for text in ["1/2", "-3/4", "7/1", "0/1"] {
            let x = parse_scalar(text).unwrap();
            assert_eq!(format_scalar(&x), text);
        }
        assert_eq!(parse_scalar("5").unwrap(), from_i64(5));
        assert_eq!(parse_scalar("2/-4").unwrap(), ratio(-1, 2));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
    }
}
