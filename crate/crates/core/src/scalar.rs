//! Exact rational scalars.
//!
//! Every coefficient and constant in the crate is a [`Scalar`]; there is no
//! floating point anywhere in term evaluation or elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Scalar = BigRational;

pub fn rat(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn from_bigint(n: BigInt) -> Scalar {
    Scalar::from_integer(n)
}

pub fn is_integer(s: &Scalar) -> bool {
    s.denom().is_one()
}

pub fn floor_int(s: &Scalar) -> BigInt {
    s.floor().to_integer()
}

pub fn ceil_int(s: &Scalar) -> BigInt {
    s.ceil().to_integer()
}

pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    a.lcm(b)
}

/// Least common multiple of the denominators of `values` (1 for an empty list).
pub fn denom_lcm<'a>(values: impl IntoIterator<Item = &'a Scalar>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| lcm(&acc, v.denom()))
}

/// Generator of the additive subgroup of the rationals spanned by `values`,
/// i.e. the largest `g > 0` with every value an integer multiple of `g`.
/// Returns `None` when all values are zero.
pub fn rational_gcd<'a>(values: impl IntoIterator<Item = &'a Scalar>) -> Option<Scalar> {
    let values: Vec<&Scalar> = values.into_iter().filter(|v| !v.is_zero()).collect();
    if values.is_empty() {
        return None;
    }
    let l = denom_lcm(values.iter().copied());
    let g = values
        .iter()
        .map(|v| (*v * Scalar::from_integer(l.clone())).to_integer().abs())
        .fold(BigInt::zero(), |acc, n| acc.gcd(&n));
    Some(Scalar::new(g, l))
}

/// The rational with the smallest denominator strictly between `lo` and `hi`
/// (ties broken towards smaller absolute numerator). Requires `lo < hi`.
pub fn simplest_between(lo: &Scalar, hi: &Scalar) -> Scalar {
    assert!(lo < hi, "simplest_between needs lo < hi");
    if lo.is_negative() && hi.is_positive() {
        return Scalar::zero();
    }
    if !lo.is_negative() {
        simplest_positive(lo, hi)
    } else {
        -simplest_positive(&-hi, &-lo)
    }
}

// Stern-Brocot descent on the open interval (lo, hi) with 0 <= lo < hi.
fn simplest_positive(lo: &Scalar, hi: &Scalar) -> Scalar {
    let fl = lo.floor();
    let candidate = &fl + Scalar::one();
    if &candidate < hi {
        return candidate;
    }
    // lo and hi share the integer part fl; recurse on reciprocals of the fractional parts.
    let lo_frac = lo - &fl;
    let hi_frac = hi - &fl;
    if lo_frac.is_zero() {
        // (0, hi_frac): find simplest 1/n below hi_frac.
        let n = (Scalar::one() / &hi_frac).floor() + Scalar::one();
        return fl + Scalar::one() / n;
    }
    let inner = simplest_positive(&(Scalar::one() / &hi_frac), &(Scalar::one() / &lo_frac));
    fl + Scalar::one() / inner
}

pub fn fmt_scalar(s: &Scalar) -> String {
    if s.denom().is_one() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

pub fn serialize_scalar<S: serde::Serializer>(s: &Scalar, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(&fmt_scalar(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_of_rationals() {
        let g = rational_gcd([&rat(2, 1), &rat(3, 1), &rat(1, 2)]).unwrap();
        assert_eq!(g, rat(1, 2));
        assert_eq!(rational_gcd([&int(4), &int(4), &int(2)]), Some(int(2)));
        assert_eq!(rational_gcd([&int(0)]), None);
    }

    #[test]
    fn simplest_rational() {
        assert_eq!(simplest_between(&rat(1, 3), &rat(1, 2)), rat(2, 5));
        assert_eq!(simplest_between(&rat(-1, 2), &rat(1, 3)), int(0));
        assert_eq!(simplest_between(&rat(5, 2), &int(3)), rat(8, 3));
        assert_eq!(simplest_between(&int(2), &int(5)), int(3));
        assert_eq!(simplest_between(&int(-5), &int(-2)), int(-3));
        assert_eq!(simplest_between(&int(0), &rat(1, 10)), rat(1, 11));
    }
}
