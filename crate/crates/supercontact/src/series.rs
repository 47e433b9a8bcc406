//! Finite power series of nilpotent perturbations, shared by Grassmann
//! numbers and super-jets: writing `a = b(1 + u)` with `b` the scalar body
//! and `u` nilpotent, every series below terminates.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub trait NilRing: Clone {
    type Scalar: Scalar;
    fn body_scalar(&self) -> Self::Scalar;
    fn from_scalar_like(&self, s: Self::Scalar) -> Self;
    fn ring_add(&self, other: &Self) -> Self;
    fn ring_mul(&self, other: &Self) -> Self;
    fn ring_scale(&self, s: &Self::Scalar) -> Self;
    fn ring_is_zero(&self) -> bool;
}

/// Returns (body, u) with `a = body·(1 + u)`.
fn split<R: NilRing>(a: &R) -> Result<(R::Scalar, R)> {
    let b = a.body_scalar();
    let binv = b.inv().map_err(|_| Error::NotInvertible)?;
    let u = a.ring_add(&a.from_scalar_like(b.neg())).ring_scale(&binv);
    Ok((b, u))
}

/// Σ_k c_k u^k for a coefficient function, stopping once u^k vanishes.
fn sum_series<R: NilRing>(u: &R, coeff: impl Fn(u32) -> R::Scalar) -> R {
    let mut acc = u.from_scalar_like(coeff(0));
    let mut power = u.clone();
    let mut k = 1;
    while !power.ring_is_zero() {
        acc = acc.ring_add(&power.ring_scale(&coeff(k)));
        power = power.ring_mul(u);
        k += 1;
    }
    acc
}

fn binomial<S: Scalar>(top: &S, k: u32) -> S {
    let mut c = S::one();
    for i in 0..k as i64 {
        c = c.mul(&top.sub(&S::from_i64(i))).mul(&S::from_ratio(1, i + 1));
    }
    c
}

pub fn inv<R: NilRing>(a: &R) -> Result<R> {
    let (b, u) = split(a)?;
    let binv = b.inv()?;
    Ok(sum_series(&u, |k| if k % 2 == 0 { R::Scalar::one() } else { R::Scalar::one().neg() }).ring_scale(&binv))
}

pub fn sqrt<R: NilRing>(a: &R) -> Result<R> {
    let (b, u) = split(a)?;
    if !b.is_positive() {
        return Err(Error::Scalar(crate::scalar::ScalarError::NonPositive));
    }
    let root = b.sqrt()?;
    let half = R::Scalar::from_ratio(1, 2);
    Ok(sum_series(&u, |k| binomial(&half, k)).ring_scale(&root))
}

/// Real power `a^λ` with the principal branch; the scalar body must admit `b^λ`.
pub fn powr<R: NilRing>(a: &R, lambda: &R::Scalar, body_pow: R::Scalar) -> Result<R> {
    let (_, u) = split(a)?;
    Ok(sum_series(&u, |k| binomial(lambda, k)).ring_scale(&body_pow))
}

pub fn ln<R: NilRing>(a: &R) -> Result<R> {
    let (b, u) = split(a)?;
    let lb = b.ln()?;
    let series = sum_series(&u, |k| {
        if k == 0 {
            R::Scalar::zero()
        } else {
            let c = R::Scalar::from_ratio(1, k as i64);
            if k % 2 == 1 {
                c
            } else {
                c.neg()
            }
        }
    });
    Ok(series.ring_add(&a.from_scalar_like(lb)))
}

pub fn exp<R: NilRing>(a: &R) -> Result<R> {
    let b = a.body_scalar();
    let eb = b.exp()?;
    let n = a.ring_add(&a.from_scalar_like(b.neg()));
    let series = sum_series(&n, |k| {
        (1..=k as i64).fold(R::Scalar::one(), |f, i| f.mul(&R::Scalar::from_ratio(1, i)))
    });
    Ok(series.ring_scale(&eb))
}
