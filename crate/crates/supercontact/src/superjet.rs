//! Truncated jets of superfunctions in N odd coordinates.
//!
//! A jet based at `x₀` is `f = Σ ξ^I h^j c_{I,j}` with `h = x − x₀`,
//! `ξ^I` the ascending product of odd coordinates and `c_{I,j}` Grassmann
//! constants written to the right. The jet carries its valid order `K`:
//! terms with `j > K` are unknown rather than zero. A negative order means
//! nothing is known.

use std::fmt;

use crate::error::{Error, Result};
use crate::grassmann::{monomial_sign, Grassmann, Parity};
use crate::scalar::Scalar;
use crate::series::{self, NilRing};

/// Largest supported number of odd coordinates.
pub const MAX_ODD: usize = 8;

#[derive(Clone, PartialEq)]
pub struct SuperJet<S> {
    n: usize,
    m: u8,
    base: S,
    order: i32,
    coeffs: Vec<Grassmann<S>>,
}

fn below(mask: u32, i: usize) -> bool {
    (mask & ((1u32 << i) - 1)).count_ones() % 2 == 1
}

impl<S: Scalar> SuperJet<S> {
    pub fn zero(n: usize, m: u8, base: S, order: i32) -> Self {
        assert!(n <= MAX_ODD, "too many odd coordinates");
        let len = if order < 0 { 0 } else { (1usize << n) * (order as usize + 1) };
        SuperJet { n, m, base, order, coeffs: vec![Grassmann::zero(m); len] }
    }

    pub fn constant(n: usize, base: S, order: i32, c: Grassmann<S>) -> Self {
        let mut f = Self::zero(n, c.m(), base, order);
        if order >= 0 {
            f.coeffs[0] = c;
        }
        f
    }

    pub fn scalar(n: usize, m: u8, base: S, order: i32, s: S) -> Self {
        Self::constant(n, base, order, Grassmann::scalar(m, s))
    }

    pub fn one(n: usize, m: u8, base: S, order: i32) -> Self {
        Self::scalar(n, m, base, order, S::one())
    }

    /// The coordinate function `x = x₀ + h`.
    pub fn x(n: usize, m: u8, base: S, order: i32) -> Self {
        let mut f = Self::scalar(n, m, base.clone(), order, base);
        f.set(0, 1, Grassmann::one(m));
        f
    }

    /// The local coordinate `h = x − x₀`.
    pub fn h(n: usize, m: u8, base: S, order: i32) -> Self {
        let mut f = Self::zero(n, m, base, order);
        f.set(0, 1, Grassmann::one(m));
        f
    }

    /// The odd coordinate ξ_{i+1}.
    pub fn xi(n: usize, m: u8, base: S, order: i32, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        let mut f = Self::zero(n, m, base, order);
        f.set(1 << i, 0, Grassmann::one(m));
        Ok(f)
    }

    /// `Σ_j p_j h^j` with scalar coefficients.
    pub fn from_h_poly(n: usize, m: u8, base: S, order: i32, poly: &[S]) -> Self {
        let mut f = Self::zero(n, m, base, order);
        for (j, p) in poly.iter().enumerate() {
            f.set(0, j, Grassmann::scalar(m, p.clone()));
        }
        f
    }

    pub fn from_terms(
        n: usize,
        m: u8,
        base: S,
        order: i32,
        terms: impl IntoIterator<Item = (u32, usize, Grassmann<S>)>,
    ) -> Result<Self> {
        if n > MAX_ODD {
            return Err(Error::IndexOutOfRange { index: n, n: MAX_ODD });
        }
        let mut f = Self::zero(n, m, base, order);
        for (mask, j, c) in terms {
            if mask >= 1 << n {
                return Err(Error::IndexOutOfRange { index: 31 - mask.leading_zeros() as usize, n });
            }
            if c.m() != m {
                return Err(Error::MismatchedGenerators(m, c.m()));
            }
            if (j as i64) <= order as i64 {
                let idx = f.idx(mask, j);
                f.coeffs[idx] = &f.coeffs[idx] + &c;
            }
        }
        Ok(f)
    }

    #[inline]
    fn idx(&self, mask: u32, j: usize) -> usize {
        mask as usize * (self.order as usize + 1) + j
    }

    /// Sets a coefficient; powers beyond the valid order are ignored.
    pub fn set(&mut self, mask: u32, j: usize, c: Grassmann<S>) {
        if (j as i64) <= self.order as i64 {
            let idx = self.idx(mask, j);
            self.coeffs[idx] = c;
        }
    }

    pub fn coeff(&self, mask: u32, j: usize) -> Grassmann<S> {
        if (j as i64) <= self.order as i64 && mask < 1 << self.n {
            self.coeffs[self.idx(mask, j)].clone()
        } else {
            Grassmann::zero(self.m)
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> u8 {
        self.m
    }

    pub fn base(&self) -> &S {
        &self.base
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    /// Non-zero coefficients as (ξ-mask, h-power, value).
    pub fn terms(&self) -> impl Iterator<Item = (u32, usize, &Grassmann<S>)> + '_ {
        let w = (self.order.max(-1) + 1) as usize;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| ((k / w) as u32, k % w, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Grassmann::is_zero)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(Grassmann::max_abs).fold(0.0, f64::max)
    }

    pub fn chop(&self, tol: f64) -> Self {
        let mut f = self.clone();
        for c in &mut f.coeffs {
            *c = c.chop(tol);
        }
        f
    }

    pub fn parity(&self) -> Parity {
        let (mut even, mut odd) = (false, false);
        for (mask, _, c) in self.terms() {
            match (c.parity(), mask.count_ones() % 2 == 1) {
                (Parity::Mixed, _) => return Parity::Mixed,
                (Parity::Even, false) | (Parity::Odd, true) => even = true,
                _ => odd = true,
            }
        }
        match (even, odd) {
            (true, true) => Parity::Mixed,
            (false, true) => Parity::Odd,
            _ => Parity::Even,
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Parity::Even
    }

    pub fn is_odd(&self) -> bool {
        self.is_zero() || self.parity() == Parity::Odd
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::MismatchedN(self.n, other.n));
        }
        if self.m != other.m {
            return Err(Error::MismatchedGenerators(self.m, other.m));
        }
        if self.base != other.base {
            return Err(Error::BaseMismatch(self.base.to_literal(), other.base.to_literal()));
        }
        Ok(())
    }

    /// Restricts to a lower valid order.
    pub fn truncate(&self, order: i32) -> Self {
        if order >= self.order {
            return self.clone();
        }
        let mut f = Self::zero(self.n, self.m, self.base.clone(), order);
        for mask in 0..1u32 << self.n {
            for j in 0..=order.max(-1) {
                f.set(mask, j as usize, self.coeff(mask, j as usize));
            }
        }
        f
    }

    /// Equality up to the smaller of the two valid orders.
    pub fn agrees(&self, other: &Self) -> bool {
        let o = self.order.min(other.order);
        self.truncate(o) == other.truncate(o)
    }

    /// Fails unless the jet is valid through order `needed`.
    pub fn require_order(&self, needed: i32) -> Result<()> {
        if self.order < needed {
            Err(Error::OrderInsufficient { needed, available: self.order })
        } else {
            Ok(())
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(&Grassmann<S>, &Grassmann<S>) -> Grassmann<S>) -> Result<Self> {
        self.compatible(other)?;
        let order = self.order.min(other.order);
        let mut out = Self::zero(self.n, self.m, self.base.clone(), order);
        for mask in 0..1u32 << self.n {
            for j in 0..=order.max(-1) {
                let j = j as usize;
                out.set(mask, j, f(&self.coeff(mask, j), &other.coeff(mask, j)));
            }
        }
        Ok(out)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let mut out = Self::zero(self.n, self.m, self.base.clone(), order);
        if order < 0 {
            return out;
        }
        let k = order as usize;
        let masks = 1u32 << self.n;
        for a in 0..masks {
            for i in 0..=k {
                let c = &self.coeffs[self.idx(a, i)];
                if c.is_zero() {
                    continue;
                }
                let ce = c.clone();
                let co = c.involution();
                for b in 0..masks {
                    let Some(neg) = monomial_sign(a, b) else { continue };
                    let left = if b.count_ones() % 2 == 1 { &co } else { &ce };
                    for j in 0..=k - i {
                        let d = &other.coeffs[other.idx(b, j)];
                        if d.is_zero() {
                            continue;
                        }
                        let p = left * d;
                        let idx = out.idx(a | b, i + j);
                        out.coeffs[idx] = if neg { &out.coeffs[idx] - &p } else { &out.coeffs[idx] + &p };
                    }
                }
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut f = self.clone();
        for c in &mut f.coeffs {
            *c = -&*c;
        }
        f
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut f = self.clone();
        for c in &mut f.coeffs {
            *c = c.scale(s);
        }
        f
    }

    /// `c · f` for a Grassmann constant `c`.
    pub fn left_mul(&self, c: &Grassmann<S>) -> Self {
        let (ce, co) = (c.clone(), c.involution());
        let mut f = self.clone();
        for mask in 0..1u32 << self.n {
            let cc = if mask.count_ones() % 2 == 1 { &co } else { &ce };
            for j in 0..=self.order.max(-1) as usize {
                if self.order < 0 {
                    break;
                }
                let idx = f.idx(mask, j);
                f.coeffs[idx] = cc * &self.coeffs[idx];
            }
        }
        f
    }

    /// `f · c` for a Grassmann constant `c`.
    pub fn right_mul(&self, c: &Grassmann<S>) -> Self {
        let mut f = self.clone();
        for x in &mut f.coeffs {
            *x = &*x * c;
        }
        f
    }

    /// The sign picked up by `f` when an element of parity `odd` passes it.
    pub fn twist(&self, odd: bool) -> Self {
        if !odd {
            return self.clone();
        }
        let mut f = self.clone();
        for mask in 0..1u32 << self.n {
            for j in 0..=self.order.max(-1) {
                if self.order < 0 {
                    break;
                }
                let idx = f.idx(mask, j as usize);
                let c = self.coeffs[idx].involution();
                f.coeffs[idx] = if mask.count_ones() % 2 == 1 { -c } else { c };
            }
        }
        f
    }

    /// `f / h` for a jet whose `h⁰` part vanishes; the order drops by one.
    pub fn div_h(&self) -> Result<Self> {
        let mut out = Self::zero(self.n, self.m, self.base.clone(), self.order - 1);
        for mask in 0..1u32 << self.n {
            if self.order >= 0 && !self.coeffs[self.idx(mask, 0)].is_zero() {
                return Err(Error::Precondition("h⁰ part does not vanish".into()));
            }
            for j in 1..=self.order.max(0) as usize {
                out.set(mask, j - 1, self.coeffs[self.idx(mask, j)].clone());
            }
        }
        Ok(out)
    }

    pub fn add_constant(&self, c: &Grassmann<S>) -> Self {
        let mut f = self.clone();
        if f.order >= 0 {
            f.coeffs[0] = &f.coeffs[0] + c;
        }
        f
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.n, self.m, self.base.clone(), self.order);
        for _ in 0..k {
            out = out.mul_unchecked(self);
        }
        out
    }

    /// ∂/∂x; lowers the valid order by one.
    pub fn dx(&self) -> Self {
        let mut out = Self::zero(self.n, self.m, self.base.clone(), self.order - 1);
        for mask in 0..1u32 << self.n {
            for j in 1..=self.order.max(0) as usize {
                let c = &self.coeffs[self.idx(mask, j)];
                if !c.is_zero() {
                    out.set(mask, j - 1, c.scale(&S::from_i64(j as i64)));
                }
            }
        }
        out
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.n {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, n: self.n })
        }
    }

    /// ∂/∂ξ_{i+1}, acting from the left.
    pub fn dxi(&self, i: usize) -> Result<Self> {
        self.check_index(i)?;
        let mut out = Self::zero(self.n, self.m, self.base.clone(), self.order);
        let bit = 1u32 << i;
        for mask in (0..1u32 << self.n).filter(|m| m & bit != 0) {
            for j in 0..=self.order.max(-1) {
                if self.order < 0 {
                    break;
                }
                let c = &self.coeffs[self.idx(mask, j as usize)];
                if !c.is_zero() {
                    out.set(mask ^ bit, j as usize, if below(mask, i) { -c } else { c.clone() });
                }
            }
        }
        Ok(out)
    }

    /// Left multiplication by ξ_{i+1}.
    pub fn mul_xi(&self, i: usize) -> Result<Self> {
        self.check_index(i)?;
        let mut out = Self::zero(self.n, self.m, self.base.clone(), self.order);
        let bit = 1u32 << i;
        for mask in (0..1u32 << self.n).filter(|m| m & bit == 0) {
            for j in 0..=self.order.max(-1) {
                if self.order < 0 {
                    break;
                }
                let c = &self.coeffs[self.idx(mask, j as usize)];
                if !c.is_zero() {
                    out.set(mask | bit, j as usize, if below(mask, i) { -c } else { c.clone() });
                }
            }
        }
        Ok(out)
    }

    /// D_{i+1} = ∂/∂ξ_{i+1} + ξ_{i+1} ∂/∂x.
    pub fn d(&self, i: usize) -> Result<Self> {
        let a = self.dxi(i)?;
        let b = self.dx().mul_xi(i)?;
        a.checked_add(&b)
    }

    /// Applies D_{i_1} first, then the next index, and so on.
    pub fn d_seq(&self, indices: &[usize]) -> Result<Self> {
        let mut f = self.clone();
        for &i in indices {
            f = f.d(i)?;
        }
        Ok(f)
    }

    /// The x-antiderivative `g` with `∂x g = f` and constant term `c`.
    pub fn antiderivative_x(&self, c: &Grassmann<S>) -> Result<Self> {
        if c.m() != self.m {
            return Err(Error::MismatchedGenerators(self.m, c.m()));
        }
        let mut out = Self::zero(self.n, self.m, self.base.clone(), self.order + 1);
        if out.order >= 0 {
            out.set(0, 0, c.clone());
        }
        for mask in 0..1u32 << self.n {
            for j in 0..=self.order.max(-1) {
                if self.order < 0 {
                    break;
                }
                let v = &self.coeffs[self.idx(mask, j as usize)];
                if !v.is_zero() {
                    out.set(mask, j as usize + 1, v.scale(&S::from_ratio(1, j as i64 + 1)));
                }
            }
        }
        Ok(out)
    }

    /// The projection onto the ordinary line: drops ξ and all souls.
    pub fn reduce_body(&self) -> Self {
        let mut out = Self::zero(0, self.m, self.base.clone(), self.order);
        for j in 0..=self.order.max(-1) {
            if self.order < 0 {
                break;
            }
            out.set(0, j as usize, Grassmann::scalar(self.m, self.coeff(0, j as usize).body()));
        }
        out
    }

    /// Re-embeds into a jet with `n` odd coordinates (`n ≥ self.n`).
    pub fn with_odd(&self, n: usize) -> Result<Self> {
        if n < self.n {
            return Err(Error::MismatchedN(self.n, n));
        }
        Self::from_terms(n, self.m, self.base.clone(), self.order, self.terms().map(|(a, j, c)| (a, j, c.clone())))
    }

    pub fn with_generators(&self, m: u8) -> Result<Self> {
        let terms: Result<Vec<_>> =
            self.terms().map(|(a, j, c)| Ok((a, j, c.with_generators(m)?))).collect();
        Self::from_terms(self.n, m, self.base.clone(), self.order, terms?)
    }

    /// The ξ-polynomial of coefficients at `h = 0`, as an order-0 jet.
    pub fn value_at_base(&self) -> Self {
        self.truncate(0)
    }

    /// Substitutes `x ↦ φ`, `ξ ↦ ψ`; all inner jets share one base. The
    /// body of `φ` at its base must equal `self.base`.
    pub fn compose(&self, phi: &SuperJet<S>, psi: &[SuperJet<S>], tol: f64) -> Result<Self> {
        if psi.len() != self.n {
            return Err(Error::MismatchedN(self.n, psi.len()));
        }
        for p in psi {
            phi.compatible(p)?;
        }
        if phi.m != self.m {
            return Err(Error::MismatchedGenerators(self.m, phi.m));
        }
        let inner_order = psi.iter().fold(phi.order, |o, p| o.min(p.order));
        if inner_order < 0 {
            return Ok(Self::zero(phi.n, self.m, phi.base.clone(), inner_order));
        }
        let mut p = phi.truncate(inner_order).add_constant(&Grassmann::scalar(self.m, self.base.neg()));
        let gap = p.coeffs[0].body();
        if !gap.is_zero() {
            if S::EXACT || gap.abs_f64() > tol * (1.0 + self.base.abs_f64()) {
                return Err(Error::BaseMismatch(
                    self.base.to_literal(),
                    phi.coeff(0, 0).body().to_literal(),
                ));
            }
            p.coeffs[0] = &p.coeffs[0] - &Grassmann::scalar(self.m, gap);
        }
        let p0 = p.truncate(0);
        let mut nu = 1i32;
        let mut pw = p0.clone();
        let tiny = |j: &Self, k: i32| !S::EXACT && j.max_abs() <= 64.0 * f64::EPSILON * p0.max_abs().max(1.0).powi(k);
        while !(pw.is_zero() || tiny(&pw, nu)) {
            pw = pw.mul_unchecked(&p0);
            nu += 1;
        }
        let order = inner_order.min(self.order + 1 - nu);
        if order < 0 {
            return Err(Error::OrderInsufficient { needed: nu - 1, available: self.order });
        }
        let p = p.truncate(order);
        let psi: Vec<_> = psi.iter().map(|q| q.truncate(order)).collect();
        let one = Self::one(phi.n, self.m, phi.base.clone(), order);
        let mut out = Self::zero(phi.n, self.m, phi.base.clone(), order);
        for mask in 0..1u32 << self.n {
            let kmax = self.order.max(-1);
            let mut g = Self::zero(phi.n, self.m, phi.base.clone(), order);
            let mut any = false;
            for j in (0..=kmax).rev() {
                g = g.mul_unchecked(&p);
                let c = &self.coeffs[self.idx(mask, j as usize)];
                if !c.is_zero() {
                    g = g.add_constant(c);
                    any = true;
                }
            }
            if !any {
                continue;
            }
            let mut monomial = one.clone();
            for (i, q) in psi.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    monomial = monomial.mul_unchecked(q);
                }
            }
            out = out.checked_add(&monomial.mul_unchecked(&g))?;
        }
        Ok(out)
    }

    /// Evaluates at a point `(x, ξ)` whose `x` has body equal to the base.
    pub fn eval(&self, x: &Grassmann<S>, xi: &[Grassmann<S>], tol: f64) -> Result<Grassmann<S>> {
        let phi = SuperJet::constant(0, S::zero(), 0, x.clone());
        let psi: Vec<_> = xi.iter().map(|c| SuperJet::constant(0, S::zero(), 0, c.clone())).collect();
        Ok(self.compose(&phi, &psi, tol)?.coeff(0, 0))
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

    /// `f^{k/2}` with the principal branch.
    pub fn pow_half(&self, k: i64) -> Result<Self> {
        let base = if k % 2 == 0 { self.clone() } else { self.sqrt()? };
        let e = if k % 2 == 0 { k / 2 } else { k };
        let p = base.pow(e.unsigned_abs() as u32);
        if e < 0 {
            p.inv()
        } else {
            Ok(p)
        }
    }

    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> SuperJet<T> {
        SuperJet {
            n: self.n,
            m: self.m,
            base: f(&self.base),
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c.map_scalars(f)).collect(),
        }
    }
}

impl<S: Scalar> NilRing for SuperJet<S> {
    type Scalar = S;
    fn body_scalar(&self) -> S {
        self.coeff(0, 0).body()
    }
    fn from_scalar_like(&self, s: S) -> Self {
        Self::scalar(self.n, self.m, self.base.clone(), self.order, s)
    }
    fn ring_add(&self, other: &Self) -> Self {
        self.checked_add(other).expect("compatible jets")
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
        impl<S: Scalar> std::ops::$tr<&SuperJet<S>> for &SuperJet<S> {
            type Output = SuperJet<S>;
            fn $method(self, rhs: &SuperJet<S>) -> SuperJet<S> {
                self.$imp(rhs).expect("incompatible jets")
            }
        }
        impl<S: Scalar> std::ops::$tr<SuperJet<S>> for SuperJet<S> {
            type Output = SuperJet<S>;
            fn $method(self, rhs: SuperJet<S>) -> SuperJet<S> {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl<S: Scalar> std::ops::Neg for &SuperJet<S> {
    type Output = SuperJet<S>;
    fn neg(self) -> SuperJet<S> {
        SuperJet::neg(self)
    }
}

impl<S: Scalar> std::ops::Neg for SuperJet<S> {
    type Output = SuperJet<S>;
    fn neg(self) -> SuperJet<S> {
        SuperJet::neg(&self)
    }
}

impl<S: Scalar> fmt::Display for SuperJet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (mask, j, c) in self.terms() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let mut rest = mask;
            while rest != 0 {
                write!(f, "x{}*", rest.trailing_zeros() + 1)?;
                rest &= rest - 1;
            }
            if j > 0 {
                write!(f, "h^{j}*")?;
            }
            write!(f, "({c})")?;
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(h^{})", self.order + 1)
    }
}

impl<S: Scalar> fmt::Debug for SuperJet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SuperJet[N={}, m={}, x0={}]({})", self.n, self.m, self.base.to_literal(), self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    type Q = Rational;
    type J = SuperJet<Q>;
    type G = Grassmann<Q>;

    fn q(n: i64) -> Q {
        Q::from_i64(n)
    }

    #[test]
    fn odd_products() {
        let x1 = J::xi(2, 0, q(0), 3, 0).unwrap();
        let x2 = J::xi(2, 0, q(0), 3, 1).unwrap();
        assert!((&x1 * &x1).is_zero());
        let p = &x1 * &x2;
        assert_eq!(p.coeff(0b11, 0), G::one(0));
        assert_eq!((&x2 * &x1).coeff(0b11, 0), G::from_i64(0, -1));
    }

    #[test]
    fn truncated_product() {
        let one = J::one(0, 0, q(0), 2);
        let h = J::h(0, 0, q(0), 2);
        let p = &(&one + &h) * &(&one - &h);
        assert_eq!(p, &one - &(&h * &h));
        assert_eq!(p.order(), 2);
    }

    #[test]
    fn d_examples() {
        let x = J::x(1, 0, q(2), 4);
        let xi = J::xi(1, 0, q(2), 4, 0).unwrap();
        assert_eq!(x.d(0).unwrap(), xi.truncate(3));
        assert_eq!(xi.d(0).unwrap(), J::one(1, 0, q(2), 3));
        let h3 = J::h(1, 0, q(0), 6).pow(3);
        assert_eq!(h3.d(0).unwrap().d(0).unwrap(), h3.dx().truncate(4));
        assert!(matches!(x.d(1), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn antiderivative_examples() {
        let c = G::from_i64(0, 5);
        let one = J::one(1, 0, q(0), 3);
        assert_eq!(one.antiderivative_x(&c).unwrap(), J::h(1, 0, q(0), 4).add_constant(&c));
        let h = J::h(1, 0, q(0), 3);
        let g = h.antiderivative_x(&c).unwrap();
        assert_eq!(g.coeff(0, 2), G::scalar(0, Q::from_ratio(1, 2)));
        let xi = J::xi(1, 0, q(0), 3, 0).unwrap();
        let g = xi.antiderivative_x(&c).unwrap();
        assert_eq!(g.coeff(1, 1), G::one(0));
        assert_eq!(g.coeff(0, 0), c);
    }

    #[test]
    fn reduce_body_examples() {
        let m = 2;
        let t1 = G::generator(m, 0).unwrap();
        let t12 = &t1 * &G::generator(m, 1).unwrap();
        let f = &J::x(1, m, q(0), 3) + &J::xi(1, m, q(0), 3, 0).unwrap().right_mul(&t1);
        assert_eq!(f.reduce_body(), J::x(0, m, q(0), 3));
        let g = J::constant(1, q(0), 3, &G::one(m) + &t12);
        assert_eq!(g.reduce_body(), J::one(0, m, q(0), 3));
        assert!(J::constant(1, q(0), 3, t12).reduce_body().is_zero());
    }

    #[test]
    fn eval_examples() {
        let m = 2;
        let t1 = G::generator(m, 0).unwrap();
        let t12 = &t1 * &G::generator(m, 1).unwrap();
        let px = &G::from_i64(m, 2) + &t12;
        let x = J::x(1, m, q(2), 3);
        assert_eq!(x.eval(&px, &[t1.clone()], 0.0).unwrap(), px);
        let x2 = J::x(1, m, q(1), 3).pow(2);
        let p1 = &G::one(m) + &t12;
        assert_eq!(x2.eval(&p1, &[t1.clone()], 0.0).unwrap(), &G::one(m) + &t12.scale(&q(2)));
        let xi = J::xi(1, m, q(2), 3, 0).unwrap();
        assert_eq!(xi.eval(&px, &[t1.clone()], 0.0).unwrap(), t1);
        assert!(matches!(x.eval(&G::from_i64(m, 3), &[t1], 0.0), Err(Error::BaseMismatch(..))));
    }

    #[test]
    fn compose_translation_shifts_base() {
        let b = q(3);
        let h_at_b = J::h(0, 0, b.clone(), 4);
        let phi = J::x(0, 0, q(0), 4).add_constant(&G::scalar(0, b));
        let r = h_at_b.compose(&phi, &[], 0.0).unwrap();
        assert_eq!(r, J::h(0, 0, q(0), 4));
    }

    #[test]
    fn composition_tracks_order_loss() {
        let m = 2;
        let t12 = &G::generator(m, 0).unwrap() * &G::generator(m, 1).unwrap();
        let f = J::x(0, m, q(0), 3).pow(2);
        let phi = J::x(0, m, q(0), 3).add_constant(&t12);
        assert_eq!(f.compose(&phi, &[], 0.0).unwrap().order(), 2);
    }

    const N: usize = 2;
    const M: u8 = 3;
    const K: i32 = 4;

    fn arb_jet(odd: Option<bool>) -> impl Strategy<Value = J> {
        prop::collection::vec((0u32..(1 << N), 0usize..=K as usize, 0u32..(1 << M), -3i64..=3), 0..12)
            .prop_map(move |v| {
                J::from_terms(
                    N,
                    M,
                    q(0),
                    K,
                    v.into_iter()
                        .filter(|(a, _, b, _)| {
                            odd.map_or(true, |o| ((a.count_ones() + b.count_ones()) % 2 == 1) == o)
                        })
                        .map(|(a, j, b, c)| (a, j, G::from_terms(M, [(b, q(c))]).unwrap())),
                )
                .unwrap()
            })
    }

    fn arb_homog() -> impl Strategy<Value = (J, bool)> {
        any::<bool>().prop_flat_map(|odd| arb_jet(Some(odd)).prop_map(move |f| (f, odd)))
    }

    proptest! {
        #[test]
        fn leibniz_rule((f, odd) in arb_homog(), g in arb_jet(None), i in 0usize..N) {
            let lhs = (&f * &g).d(i).unwrap();
            let fd = f.truncate(K - 1);
            let second = &fd * &g.d(i).unwrap();
            let rhs = &(&f.d(i).unwrap() * &g.truncate(K - 1)) + &(if odd { -second } else { second });
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn anticommutators(f in arb_jet(None), i in 0usize..N, j in 0usize..N) {
            let a = f.d(i).unwrap().d(j).unwrap();
            let b = f.d(j).unwrap().d(i).unwrap();
            let expect = if i == j { f.dx().scale(&q(2)).truncate(K - 2) } else { J::zero(N, M, q(0), K - 2) };
            prop_assert_eq!(&a + &b, expect);
        }

        #[test]
        fn product_is_associative(a in arb_jet(None), b in arb_jet(None), c in arb_jet(None)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn reduce_body_is_morphism(a in arb_jet(None), b in arb_jet(None)) {
            prop_assert_eq!((&a * &b).reduce_body(), &a.reduce_body() * &b.reduce_body());
            prop_assert_eq!(a.dx().reduce_body(), a.reduce_body().dx());
        }

        #[test]
        fn composition_is_associative(
            f in arb_jet(None),
            p1 in prop::collection::vec(-2i64..=2, 3), p2 in prop::collection::vec(-2i64..=2, 3),
            s in prop::collection::vec(-2i64..=2, 4),
        ) {
            let mk_map = |p: &[i64], c: &[i64]| {
                let x = J::x(N, M, q(0), K);
                let h = J::h(N, M, q(0), K);
                let phi = &(&x + &h.pow(2).scale(&q(p[0]))) + &(&J::xi(N, M, q(0), K, 0).unwrap() * &J::xi(N, M, q(0), K, 1).unwrap()).scale(&q(p[1]));
                let psi0 = &J::xi(N, M, q(0), K, 0).unwrap().scale(&q(c[0] + 3)) + &(&h * &J::xi(N, M, q(0), K, 1).unwrap()).scale(&q(c[1]));
                let psi1 = &J::xi(N, M, q(0), K, 1).unwrap() + &(&h.pow(2) * &J::xi(N, M, q(0), K, 0).unwrap()).scale(&q(p[2]));
                (phi, vec![psi0, psi1])
            };
            let (a_phi, a_psi) = mk_map(&p1, &s[..2]);
            let (b_phi, b_psi) = mk_map(&p2, &s[2..]);
            let lhs = f.compose(&a_phi, &a_psi, 0.0).unwrap().compose(&b_phi, &b_psi, 0.0).unwrap();
            let c_phi = a_phi.compose(&b_phi, &b_psi, 0.0).unwrap();
            let c_psi: Vec<_> = a_psi.iter().map(|p| p.compose(&b_phi, &b_psi, 0.0).unwrap()).collect();
            let rhs = f.compose(&c_phi, &c_psi, 0.0).unwrap();
            let k = lhs.order().min(rhs.order());
            prop_assert_eq!(lhs.truncate(k), rhs.truncate(k));
        }
    }
}
