//! Scalar fields the algebra is built over.
//!
//! Two instantiations are used: [`Rational`] (arbitrary precision, every
//! identity checked with zero tolerance) and `f64` (eigenvalue work and
//! elements with irrational coordinates such as `a / ||a||`).

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::CdError;

/// Exact rational scalar.
pub type Rational = BigRational;

/// Arithmetic needed by the doubling product and the dense matrices.
///
/// Operations take references so the rational instantiation does not clone
/// on every multiply-add.
pub trait Scalar: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Division; callers guarantee `rhs` is nonzero.
    fn div(&self, rhs: &Self) -> Self;
    /// Square root when it exists in the field (always for nonnegative
    /// doubles, only for perfect squares for rationals).
    fn try_sqrt(&self) -> Option<Self>;
    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;
    /// The exact value, for rational scalars.
    fn to_rational(&self) -> Option<Rational>;
    /// `true` for scalars whose arithmetic never rounds.
    const EXACT: bool;
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn try_sqrt(&self) -> Option<Self> {
        exact_sqrt(self)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }
    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    const EXACT: bool = true;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn try_sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_rational(&self) -> Option<Rational> {
        None
    }
    const EXACT: bool = false;
}

/// Integer coordinates, for homogeneous identities checked after clearing
/// denominators. Overflow panics; division must be exact.
impl Scalar for i128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn add(&self, rhs: &Self) -> Self {
        self.checked_add(*rhs).expect("i128 overflow")
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.checked_sub(*rhs).expect("i128 overflow")
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.checked_mul(*rhs).expect("i128 overflow")
    }
    fn neg(&self) -> Self {
        self.checked_neg().expect("i128 overflow")
    }
    fn div(&self, rhs: &Self) -> Self {
        assert!(self % rhs == 0, "inexact integer division {self} / {rhs}");
        self / rhs
    }
    fn try_sqrt(&self) -> Option<Self> {
        if *self < 0 {
            return None;
        }
        let r = (*self as f64).sqrt().round() as i128;
        (r - 1..=r + 1).find(|c| *c >= 0 && c.checked_mul(*c) == Some(*self))
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn to_f64(&self) -> f64 {
        *self as f64
    }
    fn to_rational(&self) -> Option<Rational> {
        Some(BigRational::from_integer(BigInt::from(*self)))
    }
    const EXACT: bool = true;
}

/// Converts a rational to the nearest representable double, including
/// values whose numerator and denominator individually overflow `f64`.
pub fn ratio_to_f64(q: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
    let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact square root of a nonnegative rational when numerator and
/// denominator are both perfect squares.
pub fn exact_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Parses `"p"`, `"p/q"` or a plain decimal such as `"-0.25"` into an exact
/// rational.
pub fn parse_rational(text: &str) -> Result<Rational, CdError> {
    let t = text.trim();
    let bad = || CdError::Parse(format!("invalid rational `{text}`"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(CdError::Parse(format!("zero denominator in `{text}`")));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = t.split_once('.') {
        let negative = int.trim_start().starts_with('-');
        let int_part = int.trim_start_matches(['+', '-']);
        if frac.is_empty() && int_part.is_empty() {
            return Err(bad());
        }
        if !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac}");
        let mantissa: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let q = BigRational::new(mantissa, scale);
        return Ok(if negative { -q } else { q });
    }
    let p: BigInt = t.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(p))
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued fractions).
pub fn rationalize(x: f64, max_den: i64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let negative = x < 0.0;
    let mut y = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    for _ in 0..64 {
        let a = y.floor();
        if a > 1e15 {
            break;
        }
        let a = a as i128;
        let p2 = a * p1 + p0;
        let q2 = a * q1 + q0;
        if q2 > max_den as i128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = y - a as f64;
        if frac < 1e-15 {
            break;
        }
        y = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    let q = BigRational::new(BigInt::from(p1), BigInt::from(q1));
    Some(if negative { -q } else { q })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_integer_and_decimal() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-6/8").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("12").unwrap(), rat(12, 1));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn exact_sqrt_only_for_squares() {
        assert_eq!(exact_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(exact_sqrt(&rat(2, 1)), None);
        assert_eq!(exact_sqrt(&rat(-1, 1)), None);
        assert_eq!(exact_sqrt(&rat(0, 1)), Some(rat(0, 1)));
    }

    #[test]
    fn rationalize_recovers_small_fractions() {
        assert_eq!(rationalize(0.75, 100), Some(rat(3, 4)));
        assert_eq!(rationalize(-2.0 / 3.0 + 1e-14, 1000), Some(rat(-2, 3)));
        assert_eq!(rationalize(4.0000000001, 1000), Some(rat(4, 1)));
    }

    #[test]
    fn integer_scalar() {
        assert_eq!(Scalar::try_sqrt(&49i128), Some(7));
        assert_eq!(Scalar::try_sqrt(&50i128), None);
        assert_eq!(Scalar::div(&12i128, &4), 3);
        assert_eq!(Scalar::to_rational(&-3i128), Some(rat(-3, 1)));
    }

    #[test]
    #[should_panic]
    fn integer_overflow_panics() {
        let _ = Scalar::mul(&i128::MAX, &2);
    }

    #[test]
    fn huge_rationals_convert() {
        let big = BigRational::new(BigInt::from(3) << 2000usize, BigInt::from(2) << 2000usize);
        assert!((ratio_to_f64(&big) - 1.5).abs() < 1e-15);
    }
}
