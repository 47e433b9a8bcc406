//! Finite Grassmann algebras over a [`Scalar`] field.
//!
//! A monomial is a bitmask of generator indices (bit `i` is θ_{i+1}); its
//! coefficient is stored for the ascending ordering of the generators.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{self, NilRing};

/// Largest supported generator count.
pub const MAX_GENERATORS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

/// Sign of θ^A θ^B once reordered into θ^{A∪B}; `None` if the product vanishes.
#[inline]
pub fn monomial_sign(a: u32, b: u32) -> Option<bool> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> j).count_ones();
        rest &= rest - 1;
    }
    Some(swaps & 1 == 1)
}

#[derive(Clone, PartialEq)]
pub struct Grassmann<S> {
    m: u8,
    terms: Vec<(u32, S)>,
}

impl<S: Scalar> Grassmann<S> {
    pub fn zero(m: u8) -> Self {
        Grassmann { m, terms: Vec::new() }
    }

    pub fn one(m: u8) -> Self {
        Self::scalar(m, S::one())
    }

    pub fn scalar(m: u8, s: S) -> Self {
        if s.is_zero() {
            Self::zero(m)
        } else {
            Grassmann { m, terms: vec![(0, s)] }
        }
    }

    pub fn from_i64(m: u8, n: i64) -> Self {
        Self::scalar(m, S::from_i64(n))
    }

    /// The generator θ_{i+1}.
    pub fn generator(m: u8, i: usize) -> Result<Self> {
        if i >= m as usize {
            return Err(Error::GeneratorOutOfRange { index: i, m });
        }
        Ok(Grassmann { m, terms: vec![(1 << i, S::one())] })
    }

    /// Builds an element from arbitrary (mask, value) pairs, summing duplicates.
    pub fn from_terms(m: u8, terms: impl IntoIterator<Item = (u32, S)>) -> Result<Self> {
        if m as usize > MAX_GENERATORS {
            return Err(Error::TooManyGenerators { got: m as usize, max: MAX_GENERATORS });
        }
        let limit = if m == 0 { 1 } else { 1u32 << m };
        let mut v = Vec::new();
        for (mask, s) in terms {
            if mask >= limit {
                return Err(Error::GeneratorOutOfRange {
                    index: 31 - mask.leading_zeros() as usize,
                    m,
                });
            }
            v.push((mask, s));
        }
        Ok(Self::normalized(m, v))
    }

    fn normalized(m: u8, mut v: Vec<(u32, S)>) -> Self {
        v.sort_by_key(|t| t.0);
        let mut out: Vec<(u32, S)> = Vec::with_capacity(v.len());
        for (mask, s) in v {
            match out.last_mut() {
                Some(last) if last.0 == mask => last.1 = last.1.add(&s),
                _ => out.push((mask, s)),
            }
        }
        out.retain(|t| !t.1.is_zero());
        Grassmann { m, terms: out }
    }

    pub fn m(&self) -> u8 {
        self.m
    }

    pub fn terms(&self) -> &[(u32, S)] {
        &self.terms
    }

    pub fn coeff(&self, mask: u32) -> S {
        match self.terms.binary_search_by_key(&mask, |t| t.0) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => S::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn body(&self) -> S {
        match self.terms.first() {
            Some((0, s)) => s.clone(),
            _ => S::zero(),
        }
    }

    pub fn soul(&self) -> Self {
        Grassmann {
            m: self.m,
            terms: self.terms.iter().filter(|t| t.0 != 0).cloned().collect(),
        }
    }

    pub fn parity(&self) -> Parity {
        let odd = self.terms.iter().filter(|t| t.0.count_ones() % 2 == 1).count();
        if odd == 0 {
            Parity::Even
        } else if odd == self.terms.len() {
            Parity::Odd
        } else {
            Parity::Mixed
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Parity::Even
    }

    pub fn is_odd(&self) -> bool {
        self.is_zero() || self.parity() == Parity::Odd
    }

    /// Largest absolute coefficient, as f64.
    pub fn max_abs(&self) -> f64 {
        self.terms.iter().map(|t| t.1.abs_f64()).fold(0.0, f64::max)
    }

    /// Drops coefficients with absolute value at most `tol`.
    pub fn chop(&self, tol: f64) -> Self {
        Grassmann {
            m: self.m,
            terms: self.terms.iter().filter(|t| t.1.abs_f64() > tol).cloned().collect(),
        }
    }

    fn check_m(&self, other: &Self) -> Result<()> {
        if self.m == other.m {
            Ok(())
        } else {
            Err(Error::MismatchedGenerators(self.m, other.m))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_m(other)?;
        Ok(self.add_unchecked(other, false))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_m(other)?;
        Ok(self.add_unchecked(other, true))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_m(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn add_unchecked(&self, other: &Self, subtract: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        let rhs = |s: &S| if subtract { s.neg() } else { s.clone() };
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, rhs(&b[j].1)));
                j += 1;
            } else {
                let s = if subtract { a[i].1.sub(&b[j].1) } else { a[i].1.add(&b[j].1) };
                if !s.is_zero() {
                    out.push((a[i].0, s));
                }
                i += 1;
                j += 1;
            }
        }
        Grassmann { m: self.m, terms: out }
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.m);
        }
        if self.terms.len() == 1 && self.terms[0].0 == 0 {
            return other.scale(&self.terms[0].1);
        }
        if other.terms.len() == 1 && other.terms[0].0 == 0 {
            return self.scale(&other.terms[0].1);
        }
        let mut v = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, sa) in &self.terms {
            for (mb, sb) in &other.terms {
                if let Some(neg) = monomial_sign(*ma, *mb) {
                    let p = sa.mul(sb);
                    v.push((ma | mb, if neg { p.neg() } else { p }));
                }
            }
        }
        Self::normalized(self.m, v)
    }

    pub fn scale(&self, s: &S) -> Self {
        if s.is_zero() {
            return Self::zero(self.m);
        }
        Grassmann { m: self.m, terms: self.terms.iter().map(|(k, v)| (*k, v.mul(s))).collect() }
    }

    pub fn neg(&self) -> Self {
        Grassmann { m: self.m, terms: self.terms.iter().map(|(k, v)| (*k, v.neg())).collect() }
    }

    /// Grade involution: odd monomials change sign.
    pub fn involution(&self) -> Self {
        Grassmann {
            m: self.m,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (*k, if k.count_ones() % 2 == 1 { v.neg() } else { v.clone() }))
                .collect(),
        }
    }

    /// Applies the grade involution when `odd` is set; used for moving an
    /// element past a factor of that parity.
    pub fn twist(&self, odd: bool) -> Self {
        if odd {
            self.involution()
        } else {
            self.clone()
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.m);
        for _ in 0..k {
            out = out.mul_unchecked(self);
        }
        out
    }

    pub fn inv(&self) -> Result<Self> {
        series::inv(self)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.inv()?)
    }

    pub fn sqrt(&self) -> Result<Self> {
        if !self.is_even() {
            return Err(Error::NotEven("square root"));
        }
        series::sqrt(self)
    }

    pub fn ln(&self) -> Result<Self> {
        if !self.is_even() {
            return Err(Error::NotEven("logarithm"));
        }
        series::ln(self)
    }

    pub fn exp(&self) -> Result<Self> {
        if !self.is_even() {
            return Err(Error::NotEven("exponential"));
        }
        series::exp(self)
    }

    /// Re-embeds into an algebra with `m` generators, keeping indices.
    pub fn with_generators(&self, m: u8) -> Result<Self> {
        Self::from_terms(m, self.terms.iter().cloned())
    }

    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Grassmann<T> {
        Grassmann::normalized(self.m, self.terms.iter().map(|(k, v)| (*k, f(v))).collect())
    }
}

impl<S: Scalar> NilRing for Grassmann<S> {
    type Scalar = S;
    fn body_scalar(&self) -> S {
        self.body()
    }
    fn from_scalar_like(&self, s: S) -> Self {
        Self::scalar(self.m, s)
    }
    fn ring_add(&self, other: &Self) -> Self {
        self.add_unchecked(other, false)
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self.mul_unchecked(other)
    }
    fn ring_scale(&self, s: &S) -> Self {
        self.scale(s)
    }
    fn ring_is_zero(&self) -> bool {
        self.is_zero()
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $imp:ident) => {
        impl<S: Scalar> std::ops::$tr<&Grassmann<S>> for &Grassmann<S> {
            type Output = Grassmann<S>;
            fn $method(self, rhs: &Grassmann<S>) -> Grassmann<S> {
                self.$imp(rhs).expect("Grassmann operands with different generator counts")
            }
        }
        impl<S: Scalar> std::ops::$tr<Grassmann<S>> for Grassmann<S> {
            type Output = Grassmann<S>;
            fn $method(self, rhs: Grassmann<S>) -> Grassmann<S> {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl<S: Scalar> std::ops::Neg for &Grassmann<S> {
    type Output = Grassmann<S>;
    fn neg(self) -> Grassmann<S> {
        Grassmann::neg(self)
    }
}

impl<S: Scalar> std::ops::Neg for Grassmann<S> {
    type Output = Grassmann<S>;
    fn neg(self) -> Grassmann<S> {
        Grassmann::neg(&self)
    }
}

pub(crate) fn mask_label(mask: u32) -> String {
    let mut parts = Vec::new();
    let mut rest = mask;
    while rest != 0 {
        parts.push(format!("t{}", rest.trailing_zeros() + 1));
        rest &= rest - 1;
    }
    parts.join("*")
}

impl<S: Scalar> fmt::Display for Grassmann<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (mask, v)) in self.terms.iter().enumerate() {
            if idx > 0 {
                f.write_str(" + ")?;
            }
            if *mask == 0 {
                write!(f, "{}", v.to_literal())?;
            } else if v.is_one() {
                f.write_str(&mask_label(*mask))?;
            } else {
                write!(f, "({})*{}", v.to_literal(), mask_label(*mask))?;
            }
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Debug for Grassmann<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Grassmann[m={}]({})", self.m, self)
    }
}

/// Hands out fresh generators of a fixed algebra.
#[derive(Debug, Clone)]
pub struct GeneratorPool {
    m: u8,
    next: u8,
}

impl GeneratorPool {
    pub fn new(m: u8) -> Self {
        GeneratorPool { m, next: 0 }
    }

    /// A pool whose first `used` generators are already taken.
    pub fn starting_at(m: u8, used: u8) -> Self {
        GeneratorPool { m, next: used }
    }

    pub fn m(&self) -> u8 {
        self.m
    }

    pub fn remaining(&self) -> usize {
        (self.m - self.next.min(self.m)) as usize
    }

    pub fn fresh<S: Scalar>(&mut self) -> Result<Grassmann<S>> {
        if self.next >= self.m {
            return Err(Error::PoolExhausted(self.m));
        }
        let g = Grassmann::generator(self.m, self.next as usize)?;
        self.next += 1;
        Ok(g)
    }

    /// A fresh odd constant `c·θ` with the given scalar multiple.
    pub fn fresh_scaled<S: Scalar>(&mut self, c: S) -> Result<Grassmann<S>> {
        Ok(self.fresh::<S>()?.scale(&c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    type G = Grassmann<Rational>;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }
    fn th(m: u8, i: usize) -> G {
        G::generator(m, i).unwrap()
    }
    fn c(m: u8, n: i64) -> G {
        G::from_i64(m, n)
    }

    #[test]
    fn antisymmetry() {
        let (t1, t2) = (th(2, 0), th(2, 1));
        assert_eq!(&t1 * &t2, G::from_terms(2, [(0b11, q(1, 1))]).unwrap());
        assert_eq!(&t2 * &t1, G::from_terms(2, [(0b11, q(-1, 1))]).unwrap());
        assert!((&t1 * &t1).is_zero());
    }

    #[test]
    fn products_from_hand_expansion() {
        let m = 4;
        let t12 = &th(m, 0) * &th(m, 1);
        let t34 = &th(m, 2) * &th(m, 3);
        assert_eq!(&(&c(m, 1) + &t12) * &(&c(m, 1) - &t12), c(m, 1));
        let lhs = &(&c(m, 1) + &t12) * &(&c(m, 3) + &t34);
        let rhs = G::from_terms(m, [(0, q(3, 1)), (0b0011, q(3, 1)), (0b1100, q(1, 1)), (0b1111, q(1, 1))]).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn mismatched_generators_rejected() {
        assert_eq!(th(2, 0).checked_mul(&th(3, 0)), Err(Error::MismatchedGenerators(2, 3)));
    }

    #[test]
    fn inverse_examples() {
        let m = 2;
        let t12 = &th(m, 0) * &th(m, 1);
        assert_eq!(c(m, 2).inv().unwrap(), G::scalar(m, q(1, 2)));
        assert_eq!((&c(m, 1) + &t12).inv().unwrap(), &c(m, 1) - &t12);
        assert_eq!(th(m, 0).inv(), Err(Error::NotInvertible));
    }

    #[test]
    fn sqrt_examples() {
        let m = 2;
        let t12 = &th(m, 0) * &th(m, 1);
        let a = &c(m, 4) + &t12.scale(&q(4, 1));
        assert_eq!(a.sqrt().unwrap(), &c(m, 2) + &t12);
        assert_eq!(c(m, 1).sqrt().unwrap(), c(m, 1));
        assert!(matches!(c(m, 2).sqrt(), Err(Error::Scalar(_))));
        assert_eq!(th(m, 0).sqrt(), Err(Error::NotEven("square root")));
    }

    #[test]
    fn log_examples() {
        let m = 2;
        let t12 = &th(m, 0) * &th(m, 1);
        assert_eq!((&c(m, 1) + &t12).ln().unwrap(), t12);
        assert!(c(m, 1).ln().unwrap().is_zero());
        let e = Grassmann::<f64>::scalar(0, std::f64::consts::E);
        assert!((e.ln().unwrap().body() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parity_tags() {
        let t12 = &th(2, 0) * &th(2, 1);
        assert_eq!((&c(2, 1) + &t12).parity(), Parity::Even);
        assert_eq!(th(2, 0).parity(), Parity::Odd);
        assert_eq!((&c(2, 1) + &th(2, 0)).parity(), Parity::Mixed);
    }

    #[test]
    fn pool_runs_out() {
        let mut pool = GeneratorPool::new(1);
        assert!(pool.fresh::<Rational>().is_ok());
        assert_eq!(pool.fresh::<Rational>(), Err(Error::PoolExhausted(1)));
    }

    const M: u8 = 5;

    fn arb_ga(parity: Option<bool>) -> impl Strategy<Value = G> {
        prop::collection::vec((0u32..(1 << M), -4i64..=4, 1i64..=3), 0..10).prop_map(move |v| {
            G::from_terms(
                M,
                v.into_iter()
                    .filter(|(mask, _, _)| parity.map_or(true, |odd| (mask.count_ones() % 2 == 1) == odd))
                    .map(|(mask, n, d)| (mask, q(n, d))),
            )
            .unwrap()
        })
    }

    fn arb_unit_even() -> impl Strategy<Value = G> {
        (arb_ga(Some(false)), 1i64..=5).prop_map(|(g, b)| &g.soul() + &c(M, b))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_ga(None), b in arb_ga(None), c3 in arb_ga(None)) {
            prop_assert_eq!(&(&a * &b) * &c3, &a * &(&b * &c3));
            prop_assert_eq!(&a * &(&b + &c3), &(&a * &b) + &(&a * &c3));
            prop_assert_eq!(&(&a + &b) * &c3, &(&a * &c3) + &(&b * &c3));
        }

        #[test]
        fn supercommutativity(a in arb_ga(Some(true)), b in arb_ga(Some(true)), e in arb_ga(Some(false))) {
            prop_assert_eq!(&a * &b, -(&b * &a));
            prop_assert_eq!(&a * &e, &e * &a);
        }

        #[test]
        fn body_is_multiplicative(a in arb_ga(None), b in arb_ga(None)) {
            prop_assert_eq!((&a * &b).body(), a.body().mul(&b.body()));
        }

        #[test]
        fn inverse_is_exact(a in arb_unit_even()) {
            prop_assert_eq!(&a * &a.inv().unwrap(), c(M, 1));
        }

        #[test]
        fn sqrt_squares_back(g in arb_ga(Some(false)), r in 1i64..=4) {
            let a = &g.soul() + &c(M, r * r);
            let s = a.sqrt().unwrap();
            prop_assert_eq!(&s * &s, a);
            prop_assert!(s.body().is_positive());
        }

        #[test]
        fn exp_log_roundtrip(g in arb_ga(Some(false))) {
            let a = &g.soul() + &c(M, 1);
            prop_assert_eq!(a.ln().unwrap().exp().unwrap(), a);
            let n = g.soul();
            prop_assert_eq!(n.exp().unwrap().ln().unwrap(), n);
        }

        #[test]
        fn soul_is_nilpotent(a in arb_ga(None)) {
            prop_assert!(a.soul().pow(M as u32 + 1).is_zero());
        }
    }
}
