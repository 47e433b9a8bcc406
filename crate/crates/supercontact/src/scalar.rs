//! Coefficient fields: exact rationals and binary floating point.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational numbers with arbitrary precision. Values whose reduced
/// numerator and denominator fit in an `i64` are stored inline; the
/// representation is canonical, so structural equality is numeric equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    /// Reduced `num/den` with `den > 0` and both different from `i64::MIN`.
    Small(i64, i64),
    /// Reduced, and never representable as `Small`.
    Big(BigRational),
}

fn fits(x: i128) -> bool {
    x > i64::MIN as i128 && x <= i64::MAX as i128
}

impl Rational {
    /// `num/den` from already-computed wide parts; `den ≠ 0`.
    fn from_i128(num: i128, den: i128) -> Self {
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        if fits(n) && fits(d) {
            Rational(Repr::Small(n as i64, d as i64))
        } else {
            Rational(Repr::Big(BigRational::new_raw(BigInt::from(n), BigInt::from(d))))
        }
    }

    fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN && d != i64::MIN => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(r)),
        }
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(n, _) => n.signum() as i32,
            Repr::Big(r) => {
                if r.is_positive() {
                    1
                } else if r.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Rational,
    Float,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Rational => "rational",
            Backend::Float => "f64",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of a non-positive value")]
    NonPositive,
    #[error("{0} is not the square of a rational; use the f64 backend")]
    NotPerfectSquare(String),
    #[error("logarithm of {0} is irrational; only log(1) is exact in rational mode")]
    IrrationalLog(String),
    #[error("exponential of {0} is irrational; only exp(0) is exact in rational mode")]
    IrrationalExp(String),
    #[error("cannot parse scalar literal {0:?}")]
    Parse(String),
}

/// A coefficient field. Both implementations are plain values; a computation
/// picks one backend through its type parameter, so backends never mix.
pub trait Scalar: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    const BACKEND: Backend;
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self, ScalarError>;
    fn is_zero(&self) -> bool;
    fn is_positive(&self) -> bool;
    fn sqrt(&self) -> Result<Self, ScalarError>;
    fn ln(&self) -> Result<Self, ScalarError>;
    fn exp(&self) -> Result<Self, ScalarError>;
    fn to_f64(&self) -> f64;
    /// The nearest value to a finite float (exact for rationals).
    fn from_f64(x: f64) -> Self;
    fn parse_literal(s: &str) -> Result<Self, ScalarError>;
    fn to_literal(&self) -> String;

    fn div(&self, other: &Self) -> Result<Self, ScalarError> {
        Ok(self.mul(&other.inv()?))
    }
    fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

fn parse_rational(s: &str) -> Result<BigRational, ScalarError> {
    let err = || ScalarError::Parse(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = t[i + 1..].parse().map_err(|_| err())?;
            (&t[..i], e)
        }
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    if exponent.unsigned_abs() > 4096 {
        return Err(err());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut num: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().map_err(|_| err())? };
    if neg {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    Ok(if scale >= 0 {
        BigRational::from_integer(num * ten.pow(scale as u32))
    } else {
        BigRational::new(num, ten.pow((-scale) as u32))
    })
}

fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

impl Scalar for Rational {
    const BACKEND: Backend = Backend::Rational;
    const EXACT: bool = true;

    fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }
    fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }
    fn from_i64(n: i64) -> Self {
        Rational::from_i128(n as i128, 1)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational::from_i128(num as i128, den as i128)
    }
    fn add(&self, other: &Self) -> Self {
        match (&self.0, &other.0) {
            (Repr::Small(0, _), _) => other.clone(),
            (_, Repr::Small(0, _)) => self.clone(),
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                if b == d {
                    Rational::from_i128(a + c, b)
                } else {
                    Rational::from_i128(a * d + c * b, b * d)
                }
            }
            _ => Rational::from_big(self.to_big() + other.to_big()),
        }
    }
    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
    fn mul(&self, other: &Self) -> Self {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                Rational::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Rational::from_big(self.to_big() * other.to_big()),
        }
    }
    fn neg(&self) -> Self {
        match &self.0 {
            Repr::Small(n, d) => Rational(Repr::Small(-n, *d)),
            Repr::Big(r) => Rational::from_big(-r),
        }
    }
    fn inv(&self) -> Result<Self, ScalarError> {
        match &self.0 {
            Repr::Small(0, _) => Err(ScalarError::DivisionByZero),
            Repr::Small(n, d) => Ok(Rational::from_i128(*d as i128, *n as i128)),
            Repr::Big(r) => Ok(Rational::from_big(r.recip())),
        }
    }
    fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }
    fn is_positive(&self) -> bool {
        self.signum() > 0
    }
    fn sqrt(&self) -> Result<Self, ScalarError> {
        if self.signum() < 0 {
            return Err(ScalarError::NonPositive);
        }
        match (exact_sqrt(&self.numer()), exact_sqrt(&self.denom())) {
            (Some(n), Some(d)) => Ok(Rational::from_big(BigRational::new(n, d))),
            _ => Err(ScalarError::NotPerfectSquare(self.to_literal())),
        }
    }
    fn ln(&self) -> Result<Self, ScalarError> {
        if self.signum() <= 0 {
            return Err(ScalarError::NonPositive);
        }
        if self.is_one() {
            Ok(Self::zero())
        } else {
            Err(ScalarError::IrrationalLog(self.to_literal()))
        }
    }
    fn exp(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            Ok(Self::one())
        } else {
            Err(ScalarError::IrrationalExp(self.to_literal()))
        }
    }
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).map(Rational::from_big).unwrap_or_else(Self::zero)
    }
    fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(r) => ToPrimitive::to_f64(r).unwrap_or(f64::NAN),
        }
    }
    fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }
    fn parse_literal(s: &str) -> Result<Self, ScalarError> {
        parse_rational(s).map(Rational::from_big)
    }
    fn to_literal(&self) -> String {
        match &self.0 {
            Repr::Small(n, 1) => n.to_string(),
            Repr::Small(n, d) => format!("{n}/{d}"),
            Repr::Big(r) if r.is_integer() => r.numer().to_string(),
            Repr::Big(r) => format!("{}/{}", r.numer(), r.denom()),
        }
    }
}

impl Scalar for f64 {
    const BACKEND: Backend = Backend::Float;
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Result<Self, ScalarError> {
        if *self == 0.0 {
            Err(ScalarError::DivisionByZero)
        } else {
            Ok(1.0 / self)
        }
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_positive(&self) -> bool {
        *self > 0.0
    }
    fn sqrt(&self) -> Result<Self, ScalarError> {
        if *self < 0.0 {
            Err(ScalarError::NonPositive)
        } else {
            Ok(f64::sqrt(*self))
        }
    }
    fn ln(&self) -> Result<Self, ScalarError> {
        if *self <= 0.0 {
            Err(ScalarError::NonPositive)
        } else {
            Ok(f64::ln(*self))
        }
    }
    fn exp(&self) -> Result<Self, ScalarError> {
        Ok(f64::exp(*self))
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn parse_literal(s: &str) -> Result<Self, ScalarError> {
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: f64 = n.trim().parse().map_err(|_| ScalarError::Parse(s.to_string()))?;
            let d: f64 = d.trim().parse().map_err(|_| ScalarError::Parse(s.to_string()))?;
            if d == 0.0 {
                return Err(ScalarError::Parse(s.to_string()));
            }
            return Ok(n / d);
        }
        t.parse().map_err(|_| ScalarError::Parse(s.to_string()))
    }
    fn to_literal(&self) -> String {
        format!("{self:?}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        Rational::parse_literal(s).unwrap()
    }

    #[test]
    fn rational_literals_roundtrip() {
        for s in ["0", "-3", "7/2", "-1/3", "123456789012345678901234567891/2"] {
            assert_eq!(q(s).to_literal(), s);
        }
        assert_eq!(q("1.25"), Rational::from_ratio(5, 4));
        assert_eq!(q("-0.5e1"), Rational::from_i64(-5));
        assert_eq!(q("4/6"), Rational::from_ratio(2, 3));
        assert!(Rational::parse_literal("1/0").is_err());
        assert!(Rational::parse_literal("abc").is_err());
        assert!(Rational::parse_literal("").is_err());
    }

    #[test]
    fn wide_values_stay_exact() {
        let big = Rational::from_i64(i64::MAX);
        let sq = big.mul(&big);
        assert_eq!(sq.to_literal(), "85070591730234615847396907784232501249");
        assert_eq!(sq.mul(&big.inv().unwrap()), big);
        assert_eq!(sq.sub(&sq), Rational::zero());
        assert_eq!(big.add(&Rational::one()).sub(&Rational::one()), big);
        let min = Rational::from_i64(i64::MIN);
        assert_eq!(min.neg().to_literal(), "9223372036854775808");
        assert_eq!(min.neg().neg(), min);
        assert_eq!(Rational::from_ratio(3, -6), Rational::from_ratio(-1, 2));
    }

    #[test]
    fn rational_sqrt_requires_square() {
        assert_eq!(q("9/4").sqrt().unwrap(), q("3/2"));
        assert!(matches!(q("2").sqrt(), Err(ScalarError::NotPerfectSquare(_))));
        assert_eq!(q("-1").sqrt(), Err(ScalarError::NonPositive));
    }

    #[test]
    fn rational_log_only_at_one() {
        assert_eq!(q("1").ln().unwrap(), q("0"));
        assert!(q("2").ln().is_err());
        assert_eq!(q("0").exp().unwrap(), q("1"));
    }

    #[test]
    fn float_literals_roundtrip() {
        for x in [0.1, -2.5, 1e-300, std::f64::consts::PI] {
            assert_eq!(f64::parse_literal(&x.to_literal()).unwrap(), x);
        }
        assert_eq!(f64::parse_literal("1/4").unwrap(), 0.25);
    }
}
