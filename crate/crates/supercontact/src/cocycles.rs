//! Tensor densities, 1-forms and quadratic differentials on S^{1|N}, and the
//! Euclidean, affine and Schwarzian cocycles of contact germs.
//!
//! Forms are written in the basis `α = dx + Σ ξⁱ dξⁱ`, `βⁱ = dξⁱ` with
//! coefficients on the right, so `df = α f′ + Σ βⁱ Dᵢ f`. Quadratic
//! differentials use the symmetric products `α²`, `αβⁱ` and `βⁱβʲ` (`i < j`),
//! where `βⁱβʲ = −βʲβⁱ` and `βⁱβⁱ = 0`.
//!
//! Every cocycle satisfies `C(Φ∘Ψ) = Ψ*C(Φ) + C(Ψ)` for the pullback of its
//! module, with `Φ` based at the image of `Ψ`'s base point.

use crate::contactmap::MapGerm;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::superjet::SuperJet;

/// `f·α^λ` with `λ = twice_weight / 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Density<S: Scalar> {
    pub twice_weight: i64,
    pub coeff: SuperJet<S>,
}

impl<S: Scalar> Density<S> {
    pub fn new(twice_weight: i64, coeff: SuperJet<S>) -> Self {
        Density { twice_weight, coeff }
    }

    pub fn weight(&self) -> S {
        S::from_ratio(self.twice_weight, 2)
    }

    /// `Φ_λ f = E_Φ^λ · (f ∘ Φ)`, where `E^{1/2}` is `Dψ` for N = 1.
    pub fn pullback(&self, germ: &MapGerm<S>, tol: f64) -> Result<Self> {
        let pulled = germ.pullback(&self.coeff, tol)?;
        if self.twice_weight == 0 {
            return Ok(Density::new(0, pulled));
        }
        let k = self.twice_weight;
        let e = if k % 2 == 0 {
            germ.multiplier(tol)?.pow_half(k)?
        } else {
            let root = multiplier_root(germ, tol)?;
            let p = root.pow(k.unsigned_abs() as u32);
            if k < 0 { p.inv()? } else { p }
        };
        Ok(Density::new(self.twice_weight, e.checked_mul(&pulled)?))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        weights_match(self.twice_weight, other.twice_weight)?;
        Ok(Density::new(self.twice_weight, self.coeff.checked_sub(&other.coeff)?))
    }

    pub fn truncate(&self, order: i32) -> Self {
        Density::new(self.twice_weight, self.coeff.truncate(order))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        weights_match(self.twice_weight, other.twice_weight)?;
        Ok(Density::new(self.twice_weight, self.coeff.checked_add(&other.coeff)?))
    }
}

/// The square root of the multiplier that `α^{1/2}` transforms by: `Dψ`
/// for N = 1 (so `E = (Dψ)²` with either sign of `Dψ`), otherwise the root
/// with positive body.
pub fn multiplier_root<S: Scalar>(germ: &MapGerm<S>, tol: f64) -> Result<SuperJet<S>> {
    if germ.n() == 1 {
        if !germ.is_certified() {
            return Err(Error::NotCertified);
        }
        Ok(germ.psi()[0].d(0)?)
    } else {
        germ.multiplier(tol)?.sqrt()
    }
}

fn weights_match(a: i64, b: i64) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::Precondition(format!("density weights {a}/2 and {b}/2 differ")))
    }
}

/// `α f + Σ βⁱ gᵢ`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneForm<S: Scalar> {
    pub alpha: SuperJet<S>,
    pub beta: Vec<SuperJet<S>>,
}

/// Basis of the quadratic differentials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadBasis {
    AlphaAlpha,
    AlphaBeta(usize),
    BetaBeta(usize, usize),
}

/// Coefficients of a quadratic differential on `α²`, `αβⁱ`, `βⁱβʲ` (`i < j`).
#[derive(Clone, Debug, PartialEq)]
pub struct QuadDiff<S: Scalar> {
    n: usize,
    comps: Vec<SuperJet<S>>,
}

fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

impl<S: Scalar> OneForm<S> {
    pub fn new(alpha: SuperJet<S>, beta: Vec<SuperJet<S>>) -> Result<Self> {
        if beta.len() != alpha.n() {
            return Err(Error::MismatchedN(alpha.n(), beta.len()));
        }
        Ok(OneForm { alpha, beta })
    }

    pub fn zero_like(f: &SuperJet<S>) -> Self {
        let z = SuperJet::zero(f.n(), f.m(), f.base().clone(), f.order());
        OneForm { alpha: z.clone(), beta: vec![z; f.n()] }
    }

    /// The basis form `α` with coefficient 1.
    pub fn alpha_basis(n: usize, like: &SuperJet<S>) -> Self {
        let mut w = Self::zero_like(like);
        w.alpha = SuperJet::one(n, like.m(), like.base().clone(), like.order());
        w
    }

    /// The basis form `βⁱ` with coefficient 1.
    pub fn beta_basis(i: usize, like: &SuperJet<S>) -> Self {
        let mut w = Self::zero_like(like);
        w.beta[i] = SuperJet::one(like.n(), like.m(), like.base().clone(), like.order());
        w
    }

    /// `df = α f′ + Σ βⁱ Dᵢ f`.
    pub fn exact(f: &SuperJet<S>) -> Result<Self> {
        let beta = (0..f.n()).map(|i| f.d(i)).collect::<Result<_>>()?;
        Ok(OneForm { alpha: f.dx(), beta })
    }

    pub fn n(&self) -> usize {
        self.beta.len()
    }

    fn components(&self) -> impl Iterator<Item = (Option<usize>, &SuperJet<S>)> {
        std::iter::once((None, &self.alpha)).chain(self.beta.iter().enumerate().map(|(i, g)| (Some(i), g)))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        Ok(OneForm {
            alpha: self.alpha.checked_add(&other.alpha)?,
            beta: self.beta.iter().zip(&other.beta).map(|(a, b)| a.checked_add(b)).collect::<Result<_>>()?,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.scale(&S::one().neg()))
    }

    pub fn scale(&self, s: &S) -> Self {
        OneForm { alpha: self.alpha.scale(s), beta: self.beta.iter().map(|g| g.scale(s)).collect() }
    }

    /// `ω · c` with the jet `c` multiplied on the right of every coefficient.
    pub fn right_mul(&self, c: &SuperJet<S>) -> Result<Self> {
        Ok(OneForm {
            alpha: self.alpha.checked_mul(c)?,
            beta: self.beta.iter().map(|g| g.checked_mul(c)).collect::<Result<_>>()?,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.is_zero() && self.beta.iter().all(SuperJet::is_zero)
    }

    pub fn max_abs(&self) -> f64 {
        self.beta.iter().map(SuperJet::max_abs).fold(self.alpha.max_abs(), f64::max)
    }

    pub fn truncate(&self, order: i32) -> Self {
        OneForm { alpha: self.alpha.truncate(order), beta: self.beta.iter().map(|g| g.truncate(order)).collect() }
    }

    /// `Φ*α = E_Φ α` and `Φ*βⁱ = dψⁱ = α ψⁱ′ + Σⱼ βʲ Dⱼψⁱ`.
    pub fn pullback_basis(germ: &MapGerm<S>, tol: f64) -> Result<(Self, Vec<Self>)> {
        let e = germ.multiplier(tol)?;
        let mut a = Self::zero_like(&e);
        a.alpha = e;
        let betas = germ.psi().iter().map(Self::exact).collect::<Result<_>>()?;
        Ok((a, betas))
    }

    /// `Φ*ω`.
    pub fn pullback(&self, germ: &MapGerm<S>, tol: f64) -> Result<Self> {
        let (pa, pb) = Self::pullback_basis(germ, tol)?;
        let mut out = pa.right_mul(&germ.pullback(&self.alpha, tol)?)?;
        for (b, g) in pb.iter().zip(&self.beta) {
            out = out.checked_add(&b.right_mul(&germ.pullback(g, tol)?)?)?;
        }
        Ok(out)
    }

    /// The symmetric product `ω₁ ω₂`.
    pub fn sym_mul(&self, other: &Self) -> Result<QuadDiff<S>> {
        let n = self.n();
        let like = self.alpha.checked_mul(&other.alpha)?;
        let mut q = QuadDiff::zero_like(n, &like);
        for (ea, fa) in self.components() {
            for (eb, gb) in other.components() {
                let Some((sign, basis)) = basis_product(ea, eb) else { continue };
                let c = fa.twist(eb.is_some()).checked_mul(gb)?;
                let c = if sign { c } else { c.neg() };
                q.add_to(basis, &c)?;
            }
        }
        Ok(q)
    }

    /// `L_{Dᵢ}`: uses `L_{Dᵢ}α = 2βⁱ`, `L_{Dᵢ}βʲ = 0` and the odd Leibniz rule.
    pub fn lie_d(&self, i: usize) -> Result<Self> {
        let mut out = OneForm {
            alpha: self.alpha.d(i)?,
            beta: self.beta.iter().map(|g| Ok(g.d(i)?.neg())).collect::<Result<Vec<_>>>()?,
        };
        out.beta[i] = out.beta[i].checked_add(&self.alpha.scale(&S::from_i64(2)))?;
        Ok(out)
    }

    /// `L_{∂x}` acts on the coefficients only.
    pub fn lie_dx(&self) -> Self {
        OneForm { alpha: self.alpha.dx(), beta: self.beta.iter().map(SuperJet::dx).collect() }
    }
}

/// `e_a e_b` in the quadratic basis; `None` for the index of `α`.
fn basis_product(a: Option<usize>, b: Option<usize>) -> Option<(bool, QuadBasis)> {
    match (a, b) {
        (None, None) => Some((true, QuadBasis::AlphaAlpha)),
        (None, Some(i)) | (Some(i), None) => Some((true, QuadBasis::AlphaBeta(i))),
        (Some(i), Some(j)) if i < j => Some((true, QuadBasis::BetaBeta(i, j))),
        (Some(i), Some(j)) if i > j => Some((false, QuadBasis::BetaBeta(j, i))),
        _ => None,
    }
}

impl<S: Scalar> QuadDiff<S> {
    pub fn zero_like(n: usize, like: &SuperJet<S>) -> Self {
        let z = SuperJet::zero(like.n(), like.m(), like.base().clone(), like.order());
        QuadDiff { n, comps: vec![z; 1 + n + pair_count(n)] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn slot(&self, b: QuadBasis) -> usize {
        match b {
            QuadBasis::AlphaAlpha => 0,
            QuadBasis::AlphaBeta(i) => 1 + i,
            QuadBasis::BetaBeta(i, j) => 1 + self.n + pair_index(self.n, i, j),
        }
    }

    pub fn basis(&self) -> Vec<QuadBasis> {
        let mut out = vec![QuadBasis::AlphaAlpha];
        out.extend((0..self.n).map(QuadBasis::AlphaBeta));
        for i in 0..self.n {
            for j in i + 1..self.n {
                out.push(QuadBasis::BetaBeta(i, j));
            }
        }
        out
    }

    pub fn get(&self, b: QuadBasis) -> &SuperJet<S> {
        &self.comps[self.slot(b)]
    }

    pub fn set(&mut self, b: QuadBasis, c: SuperJet<S>) {
        let k = self.slot(b);
        self.comps[k] = c;
    }

    fn add_to(&mut self, b: QuadBasis, c: &SuperJet<S>) -> Result<()> {
        let k = self.slot(b);
        self.comps[k] = self.comps[k].checked_add(c)?;
        Ok(())
    }

    pub fn aa(&self) -> &SuperJet<S> {
        self.get(QuadBasis::AlphaAlpha)
    }

    pub fn ab(&self, i: usize) -> &SuperJet<S> {
        self.get(QuadBasis::AlphaBeta(i))
    }

    pub fn bb(&self, i: usize, j: usize) -> &SuperJet<S> {
        self.get(QuadBasis::BetaBeta(i, j))
    }

    pub fn components(&self) -> impl Iterator<Item = (QuadBasis, &SuperJet<S>)> {
        self.basis().into_iter().zip(self.comps.iter())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::MismatchedN(self.n, other.n));
        }
        Ok(QuadDiff {
            n: self.n,
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.checked_add(b)).collect::<Result<_>>()?,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.scale(&S::one().neg()))
    }

    pub fn scale(&self, s: &S) -> Self {
        QuadDiff { n: self.n, comps: self.comps.iter().map(|c| c.scale(s)).collect() }
    }

    pub fn right_mul(&self, c: &SuperJet<S>) -> Result<Self> {
        Ok(QuadDiff { n: self.n, comps: self.comps.iter().map(|x| x.checked_mul(c)).collect::<Result<_>>()? })
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(SuperJet::is_zero)
    }

    /// The smallest valid order among the components.
    pub fn order(&self) -> i32 {
        self.comps.iter().map(SuperJet::order).min().unwrap_or(-1)
    }

    pub fn truncate(&self, order: i32) -> Self {
        QuadDiff { n: self.n, comps: self.comps.iter().map(|c| c.truncate(order)).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().map(SuperJet::max_abs).fold(0.0, f64::max)
    }

    /// `Φ*Q`, expanded through the pulled-back basis 1-forms.
    pub fn pullback(&self, germ: &MapGerm<S>, tol: f64) -> Result<Self> {
        let (pa, pb) = OneForm::pullback_basis(germ, tol)?;
        let form = |e: Option<usize>| match e {
            None => &pa,
            Some(i) => &pb[i],
        };
        let mut out: Option<QuadDiff<S>> = None;
        for (b, c) in self.components() {
            let (x, y) = match b {
                QuadBasis::AlphaAlpha => (None, None),
                QuadBasis::AlphaBeta(i) => (None, Some(i)),
                QuadBasis::BetaBeta(i, j) => (Some(i), Some(j)),
            };
            let term = form(x).sym_mul(form(y))?.right_mul(&germ.pullback(c, tol)?)?;
            out = Some(match out {
                None => term,
                Some(acc) => acc.checked_add(&term)?,
            });
        }
        Ok(out.expect("the basis is never empty"))
    }
}

/// `log c + rest` for a positive constant `c`; kept symbolic so that the
/// Euclidean cocycle law can be checked exactly in rational mode.
#[derive(Clone, Debug, PartialEq)]
pub struct LogJet<S: Scalar> {
    pub body: S,
    pub rest: SuperJet<S>,
}

impl<S: Scalar> LogJet<S> {
    /// `log E` for an even jet with positive body.
    pub fn of(e: &SuperJet<S>) -> Result<Self> {
        let body = e.coeff(0, 0).body();
        if !body.is_positive() {
            return Err(Error::Precondition("logarithm of a jet with non-positive body".into()));
        }
        let rest = e.scale(&body.inv()?).ln()?;
        Ok(LogJet { body, rest })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        Ok(LogJet { body: self.body.mul(&other.body), rest: self.rest.checked_add(&other.rest)? })
    }

    pub fn pullback(&self, germ: &MapGerm<S>, tol: f64) -> Result<Self> {
        Ok(LogJet { body: self.body.clone(), rest: germ.pullback(&self.rest, tol)? })
    }

    /// The jet `log c + rest`; exact only when `log c` is.
    pub fn to_jet(&self) -> Result<SuperJet<S>> {
        let c = self.body.ln()?;
        Ok(self.rest.add_constant(&crate::grassmann::Grassmann::scalar(self.rest.m(), c)))
    }

    /// Residual jets: the difference of the non-constant parts, then the
    /// difference of the exponentiated constants as an `h⁰` term.
    pub fn residual(&self, other: &Self) -> Result<Vec<SuperJet<S>>> {
        let d = self.rest.checked_sub(&other.rest)?;
        let c = SuperJet::scalar(d.n(), d.m(), d.base().clone(), d.order().max(0), self.body.sub(&other.body));
        Ok(vec![d, c])
    }

    pub fn reduce_body(&self) -> Self {
        LogJet { body: self.body.clone(), rest: self.rest.reduce_body() }
    }
}

fn requires_n<S: Scalar>(germ: &MapGerm<S>, n: usize) -> Result<()> {
    if germ.n() == n {
        Ok(())
    } else {
        Err(Error::MismatchedN(n, germ.n()))
    }
}

fn agree<S: Scalar>(a: &SuperJet<S>, b: &SuperJet<S>, tol: f64, what: &str) -> Result<()> {
    let d = a.checked_sub(b)?;
    let scale = a.max_abs().max(b.max_abs()).max(1.0);
    if d.is_zero() || (!S::EXACT && d.max_abs() <= tol * scale) {
        Ok(())
    } else {
        Err(Error::Disagreement(format!("{what}: forms differ by {:e}", d.max_abs())))
    }
}

/// `log E_Φ` in symbolic form.
pub fn log_multiplier<S: Scalar>(germ: &MapGerm<S>, tol: f64) -> Result<LogJet<S>> {
    LogJet::of(&germ.multiplier(tol)?)
}

/// The Euclidean cocycle `E(Φ) = log E_Φ` as a 0-density.
pub fn cocycle_e<S: Scalar>(germ: &MapGerm<S>, tol: f64) -> Result<Density<S>> {
    Ok(Density::new(0, log_multiplier(germ, tol)?.to_jet()?))
}

/// The affine cocycle `A(Φ) = dE_Φ / E_Φ`.
pub fn cocycle_a<S: Scalar>(germ: &MapGerm<S>, tol: f64) -> Result<OneForm<S>> {
    let e = germ.multiplier(tol)?;
    let de = OneForm::exact(&e)?;
    de.right_mul(&e.inv()?)
}

/// The projected affine cocycle `(DE_Φ/E_Φ) α^{1/2}` (N = 1).
pub fn cocycle_a_proj<S: Scalar>(germ: &MapGerm<S>, tol: f64) -> Result<Density<S>> {
    requires_n(germ, 1)?;
    let e = germ.multiplier(tol)?;
    Ok(Density::new(1, e.d(0)?.div(&e)?))
}

/// The classical Schwarzian `f‴/f′ − 3/2 (f″/f′)²` of an ordinary jet.
pub fn schwarzian_s0<S: Scalar>(f: &SuperJet<S>) -> Result<SuperJet<S>> {
    let f1 = f.dx();
    if f1.order() < 0 || f1.coeff(0, 0).body().is_zero() {
        return Err(Error::Precondition("critical point: f′ has zero body".into()));
    }
    let r = f1.dx().div(&f1)?;
    let s = f1.dx().dx().div(&f1)?;
    s.checked_sub(&r.checked_mul(&r)?.scale(&S::from_ratio(3, 2)))
}

/// `S̃ = DE′/E − 3/2 E′ DE / E²` (N = 1).
pub fn s_tilde<S: Scalar>(e: &SuperJet<S>) -> Result<SuperJet<S>> {
    let einv = e.inv()?;
    let a = e.dx().d(0)?.checked_mul(&einv)?;
    let b = e.dx().checked_mul(&e.d(0)?)?.checked_mul(&einv.pow(2))?;
    a.checked_sub(&b.scale(&S::from_ratio(3, 2)))
}

/// The three expressions of the N = 1 Schwarzian density.
#[derive(Clone, Debug)]
pub struct S1Forms<S: Scalar> {
    /// `¼ (D³E/E − 3/2 DE·D²E/E²)`.
    pub from_e: SuperJet<S>,
    /// `½ (D⁴ψ/Dψ − 2 D²ψ D³ψ/(Dψ)²)`.
    pub from_psi: SuperJet<S>,
    /// `−½ E^{1/2} D³(E^{−1/2})`.
    pub from_root: SuperJet<S>,
}

pub fn schwarzian_s1_forms<S: Scalar>(germ: &MapGerm<S>, tol: f64) -> Result<S1Forms<S>> {
    requires_n(germ, 1)?;
    let e = germ.multiplier(tol)?;
    let einv = e.inv()?;
    let d = |f: &SuperJet<S>, k: usize| f.d_seq(&vec![0; k]);
    let from_e = d(&e, 3)?
        .checked_mul(&einv)?
        .checked_sub(&d(&e, 1)?.checked_mul(&d(&e, 2)?)?.checked_mul(&einv.pow(2))?.scale(&S::from_ratio(3, 2)))?
        .scale(&S::from_ratio(1, 4));
    let psi = &germ.psi()[0];
    let u = d(psi, 1)?;
    let uinv = u.inv()?;
    let from_psi = d(psi, 4)?
        .checked_mul(&uinv)?
        .checked_sub(&d(psi, 2)?.checked_mul(&d(psi, 3)?)?.checked_mul(&uinv.pow(2))?.scale(&S::from_i64(2)))?
        .scale(&S::from_ratio(1, 2));
    let from_root = e.pow_half(1)?.checked_mul(&d(&e.pow_half(-1)?, 3)?)?.scale(&S::from_ratio(-1, 2));
    Ok(S1Forms { from_e, from_psi, from_root })
}

/// The N = 1 Schwarzian density `S(Φ) α^{3/2}`, after checking that its
/// three expressions agree.
pub fn schwarzian_s1<S: Scalar>(germ: &MapGerm<S>, tol: f64) -> Result<Density<S>> {
    let f = schwarzian_s1_forms(germ, tol)?;
    agree(&f.from_e, &f.from_psi, tol, "S1 E-form vs ψ-form")?;
    agree(&f.from_e, &f.from_root, tol, "S1 E-form vs E^{-1/2}-form")?;
    Ok(Density::new(3, f.from_e))
}

/// The N = 1 quadratic Schwarzian `1/6 α² DS̃ + ½ αβ S̃`.
pub fn quad_s1<S: Scalar>(germ: &MapGerm<S>, tol: f64) -> Result<QuadDiff<S>> {
    requires_n(germ, 1)?;
    let st = s_tilde(&germ.multiplier(tol)?)?;
    let mut q = QuadDiff::zero_like(1, &st);
    q.set(QuadBasis::AlphaAlpha, st.d(0)?.scale(&S::from_ratio(1, 6)));
    q.set(QuadBasis::AlphaBeta(0), st.scale(&S::from_ratio(1, 2)));
    Ok(q)
}

/// The N = 0 quadratic Schwarzian `1/6 S₀(f) dx²`, normalized as the
/// `ε²` term of the cross-ratio expansion.
pub fn quad_s0<S: Scalar>(germ: &MapGerm<S>) -> Result<QuadDiff<S>> {
    requires_n(germ, 0)?;
    let s0 = schwarzian_s0(germ.phi())?;
    let mut q = QuadDiff::zero_like(0, &s0);
    q.set(QuadBasis::AlphaAlpha, s0.scale(&S::from_ratio(1, 6)));
    Ok(q)
}

/// The two expressions of the N = 2 Schwarzian density.
#[derive(Clone, Debug)]
pub struct S2Forms<S: Scalar> {
    /// `D₂D₁E/E − 3/2 D₂E·D₁E/E²`.
    pub from_e: SuperJet<S>,
    /// `−2 E^{1/2} D₂D₁(E^{−1/2})`.
    pub from_root: SuperJet<S>,
}

pub fn schwarzian_s2_forms<S: Scalar>(germ: &MapGerm<S>, tol: f64) -> Result<S2Forms<S>> {
    requires_n(germ, 2)?;
    let e = germ.multiplier(tol)?;
    let einv = e.inv()?;
    let from_e = e
        .d_seq(&[0, 1])?
        .checked_mul(&einv)?
        .checked_sub(&e.d(1)?.checked_mul(&e.d(0)?)?.checked_mul(&einv.pow(2))?.scale(&S::from_ratio(3, 2)))?;
    let from_root = e.pow_half(1)?.checked_mul(&e.pow_half(-1)?.d_seq(&[0, 1])?)?.scale(&S::from_i64(-2));
    Ok(S2Forms { from_e, from_root })
}

/// The N = 2 Schwarzian density `S₁₂ α`.
pub fn schwarzian_s2<S: Scalar>(germ: &MapGerm<S>, tol: f64) -> Result<Density<S>> {
    let f = schwarzian_s2_forms(germ, tol)?;
    agree(&f.from_e, &f.from_root, tol, "S2 E-form vs E^{-1/2}-form")?;
    Ok(Density::new(2, f.from_e))
}

/// The N = 2 quadratic Schwarzian from the second-order expansion of
/// `Φ*[t₁, t₂]`:
/// `α²(E″/6E + ψ′·ψ″/3E − ¼(E′/E)²) + αβⁱ(½DᵢE′/E − ψ′·Dᵢψ′/E − E′DᵢE/2E²)
///  + β¹β²(D₂D₁E/E − 2C₁₂/E − D₂E·D₁E/2E²)` with `C₁₂ = D₂D₁φ′ + ψ·D₂D₁ψ′`.
pub fn quad_s2<S: Scalar>(germ: &MapGerm<S>, tol: f64) -> Result<QuadDiff<S>> {
    requires_n(germ, 2)?;
    let e = germ.multiplier(tol)?;
    let einv = e.inv()?;
    let e1 = e.dx();
    let psi = germ.psi();
    let dot = |a: &dyn Fn(&SuperJet<S>) -> Result<SuperJet<S>>, b: &dyn Fn(&SuperJet<S>) -> Result<SuperJet<S>>| {
        let mut acc: Option<SuperJet<S>> = None;
        for p in psi {
            let t = a(p)?.checked_mul(&b(p)?)?;
            acc = Some(match acc {
                None => t,
                Some(x) => x.checked_add(&t)?,
            });
        }
        Ok::<_, Error>(acc.expect("N = 2"))
    };
    let third = S::from_ratio(1, 3);
    let half = S::from_ratio(1, 2);
    let ratio = e1.checked_mul(&einv)?;
    let aa = e1
        .dx()
        .checked_mul(&einv)?
        .scale(&S::from_ratio(1, 6))
        .checked_add(&dot(&|p| Ok(p.dx()), &|p| Ok(p.dx().dx()))?.checked_mul(&einv)?.scale(&third))?
        .checked_sub(&ratio.checked_mul(&ratio)?.scale(&S::from_ratio(1, 4)))?;
    let mut q = QuadDiff::zero_like(2, &aa);
    q.set(QuadBasis::AlphaAlpha, aa);
    for i in 0..2 {
        let si = e1
            .d(i)?
            .checked_mul(&einv)?
            .scale(&half)
            .checked_sub(&dot(&|p| Ok(p.dx()), &|p| p.dx().d(i))?.checked_mul(&einv)?)?
            .checked_sub(&e1.checked_mul(&e.d(i)?)?.checked_mul(&einv.pow(2))?.scale(&half))?;
        q.set(QuadBasis::AlphaBeta(i), si);
    }
    let phi = germ.phi();
    let c12 = phi.dx().d_seq(&[0, 1])?.checked_add(&dot(&|p| Ok(p.clone()), &|p| p.dx().d_seq(&[0, 1]))?)?;
    let s12 = e
        .d_seq(&[0, 1])?
        .checked_mul(&einv)?
        .checked_sub(&c12.checked_mul(&einv)?.scale(&S::from_i64(2)))?
        .checked_sub(&e.d(1)?.checked_mul(&e.d(0)?)?.checked_mul(&einv.pow(2))?.scale(&half))?;
    q.set(QuadBasis::BetaBeta(0, 1), s12);
    Ok(q)
}

/// The quadratic differential generated by a 1-density `S₁₂ α`:
/// `1/6 α²(D₁D₂S₁₂ + ½S₁₂²) + ½ αβ¹ D₂S₁₂ − ½ αβ² D₁S₁₂ + β¹β² S₁₂`.
pub fn quad_s2_from_density<S: Scalar>(s12: &SuperJet<S>) -> Result<QuadDiff<S>> {
    if s12.n() != 2 {
        return Err(Error::MismatchedN(2, s12.n()));
    }
    let half = S::from_ratio(1, 2);
    let aa = s12
        .d_seq(&[1, 0])?
        .checked_add(&s12.checked_mul(s12)?.scale(&half))?
        .scale(&S::from_ratio(1, 6));
    let mut q = QuadDiff::zero_like(2, &aa);
    q.set(QuadBasis::AlphaAlpha, aa);
    q.set(QuadBasis::AlphaBeta(0), s12.d(1)?.scale(&half));
    q.set(QuadBasis::AlphaBeta(1), s12.d(0)?.scale(&half).neg());
    q.set(QuadBasis::BetaBeta(0, 1), s12.clone());
    Ok(q)
}

/// Residuals of `S₁ = ½D₂S₁₂`, `S₂ = −½D₁S₁₂`, `6S = D₁D₂S₁₂ + ½S₁₂²` and of
/// the two expressions of `S₁₂`.
pub fn s2_relations<S: Scalar>(germ: &MapGerm<S>, tol: f64) -> Result<Vec<SuperJet<S>>> {
    let q = quad_s2(germ, tol)?;
    let s12 = schwarzian_s2(germ, tol)?.coeff;
    let half = S::from_ratio(1, 2);
    Ok(vec![
        q.ab(0).checked_sub(&s12.d(1)?.scale(&half))?,
        q.ab(1).checked_add(&s12.d(0)?.scale(&half))?,
        q.aa()
            .scale(&S::from_i64(6))
            .checked_sub(&s12.d_seq(&[1, 0])?)?
            .checked_sub(&s12.checked_mul(&s12)?.scale(&half))?,
        q.bb(0, 1).checked_sub(&s12)?,
    ])
}

/// The quadratic Schwarzian for N = 0, 1, 2.
pub fn quad_schwarzian<S: Scalar>(germ: &MapGerm<S>, tol: f64) -> Result<QuadDiff<S>> {
    match germ.n() {
        0 => quad_s0(germ),
        1 => quad_s1(germ, tol),
        2 => quad_s2(germ, tol),
        n => Err(Error::Precondition(format!("no projective cocycle for N = {n}"))),
    }
}

/// The Schwarzian density for N = 1, 2.
pub fn schwarzian<S: Scalar>(germ: &MapGerm<S>, tol: f64) -> Result<Density<S>> {
    match germ.n() {
        1 => schwarzian_s1(germ, tol),
        2 => schwarzian_s2(germ, tol),
        n => Err(Error::Precondition(format!("no Schwarzian density for N = {n}"))),
    }
}

/// `α^{1/2}⟨D, αf + βg⟩ = g α^{1/2}` (N = 1).
pub fn project_oneform<S: Scalar>(w: &OneForm<S>) -> Result<Density<S>> {
    if w.n() != 1 {
        return Err(Error::MismatchedN(1, w.n()));
    }
    Ok(Density::new(1, w.beta[0].clone()))
}

/// `α^{1/2}⟨D, α²f + αβg⟩ = ½ g α^{3/2}` (N = 1).
pub fn project_quad<S: Scalar>(q: &QuadDiff<S>) -> Result<Density<S>> {
    if q.n() != 1 {
        return Err(Error::MismatchedN(1, q.n()));
    }
    Ok(Density::new(3, q.ab(0).scale(&S::from_ratio(1, 2))))
}

/// `α⟨D₂⊗D₁, ·⟩` onto 1-densities (N = 2): the `β¹β²` coefficient.
pub fn project_quad_n2<S: Scalar>(q: &QuadDiff<S>) -> Result<Density<S>> {
    if q.n() != 2 {
        return Err(Error::MismatchedN(2, q.n()));
    }
    Ok(Density::new(2, q.bb(0, 1).clone()))
}

/// `α^{1/2} L_D (g α^{1/2}) = α Dg + β g` (N = 1).
pub fn section_half<S: Scalar>(g: &Density<S>) -> Result<OneForm<S>> {
    if g.twice_weight != 1 || g.coeff.n() != 1 {
        return Err(Error::Precondition("section from F_{1/2} needs a 1/2-density on S^{1|1}".into()));
    }
    OneForm::new(g.coeff.d(0)?, vec![g.coeff.clone()])
}

/// `α^{1/2} L_D (g α^{3/2}) = α² Dg + 3 αβ g` (N = 1).
pub fn section_three_halves<S: Scalar>(g: &Density<S>) -> Result<QuadDiff<S>> {
    if g.twice_weight != 3 || g.coeff.n() != 1 {
        return Err(Error::Precondition("section from F_{3/2} needs a 3/2-density on S^{1|1}".into()));
    }
    let mut q = QuadDiff::zero_like(1, &g.coeff);
    q.set(QuadBasis::AlphaAlpha, g.coeff.d(0)?);
    q.set(QuadBasis::AlphaBeta(0), g.coeff.scale(&S::from_i64(3)));
    Ok(q)
}

/// `S(Φ) − ¼ α^{1/2}⟨D, (α^{1/2}L_D)²A(Φ) − ½A(Φ)²⟩`, using
/// `(α^{1/2}L_D)² = α L_{∂x} + β L_D` on 1-forms.
pub fn cars_residual<S: Scalar>(germ: &MapGerm<S>, tol: f64) -> Result<SuperJet<S>> {
    requires_n(germ, 1)?;
    let a = cocycle_a(germ, tol)?;
    let like = &a.alpha;
    let twice = OneForm::alpha_basis(1, like)
        .sym_mul(&a.lie_dx())?
        .checked_add(&OneForm::beta_basis(0, like).sym_mul(&a.lie_d(0)?)?)?;
    let q = twice.checked_sub(&a.sym_mul(&a)?.scale(&S::from_ratio(1, 2)))?;
    let rhs = project_quad(&q)?.coeff.scale(&S::from_ratio(1, 4));
    schwarzian_s1(germ, tol)?.coeff.checked_sub(&rhs)
}

/// The cocycles whose law is checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cocycle {
    Euclid,
    Affine,
    AffineProj,
    Schwarzian,
    SchwarzianQuad,
}

/// Residual jets of `C(Φ∘Ψ) − Ψ*C(Φ) − C(Ψ)`; `phi` must be based at the
/// body of `psi`'s image base.
pub fn law_residual<S: Scalar>(
    c: Cocycle,
    phi: &MapGerm<S>,
    psi: &MapGerm<S>,
    tol: f64,
) -> Result<Vec<SuperJet<S>>> {
    law_residuals(&[c], phi, psi, tol)
}

/// [`law_residual`] for several cocycles, composing once.
pub fn law_residuals<S: Scalar>(
    cs: &[Cocycle],
    phi: &MapGerm<S>,
    psi: &MapGerm<S>,
    tol: f64,
) -> Result<Vec<SuperJet<S>>> {
    let comp = phi.compose(psi, tol)?;
    let mut out = Vec::new();
    // Floating residuals are taken relative to the larger side.
    let mut push = |d: Vec<SuperJet<S>>, size: f64| {
        let k = S::from_f64(1.0 / size.max(1.0));
        out.extend(d.into_iter().map(|j| if S::EXACT { j } else { j.scale(&k) }));
    };
    for c in cs {
        match c {
            Cocycle::Euclid => {
                let lhs = log_multiplier(&comp, tol)?;
                let rhs = log_multiplier(phi, tol)?.pullback(psi, tol)?.checked_add(&log_multiplier(psi, tol)?)?;
                let size = lhs.rest.max_abs().max(rhs.rest.max_abs()).max(lhs.body.abs_f64());
                push(lhs.residual(&rhs)?, size);
            }
            Cocycle::Affine => {
                let lhs = cocycle_a(&comp, tol)?;
                let rhs = cocycle_a(phi, tol)?.pullback(psi, tol)?.checked_add(&cocycle_a(psi, tol)?)?;
                let d = lhs.checked_sub(&rhs)?;
                let mut v = vec![d.alpha];
                v.extend(d.beta);
                push(v, lhs.max_abs().max(rhs.max_abs()));
            }
            Cocycle::AffineProj => {
                let lhs = cocycle_a_proj(&comp, tol)?;
                let rhs = cocycle_a_proj(phi, tol)?.pullback(psi, tol)?.checked_add(&cocycle_a_proj(psi, tol)?)?;
                push(vec![lhs.checked_sub(&rhs)?.coeff], lhs.coeff.max_abs().max(rhs.coeff.max_abs()));
            }
            Cocycle::Schwarzian => {
                let lhs = schwarzian(&comp, tol)?;
                let rhs = schwarzian(phi, tol)?.pullback(psi, tol)?.checked_add(&schwarzian(psi, tol)?)?;
                push(vec![lhs.checked_sub(&rhs)?.coeff], lhs.coeff.max_abs().max(rhs.coeff.max_abs()));
            }
            Cocycle::SchwarzianQuad => {
                let lhs = quad_schwarzian(&comp, tol)?;
                let rhs = quad_schwarzian(phi, tol)?.pullback(psi, tol)?.checked_add(&quad_schwarzian(psi, tol)?)?;
                push(lhs.checked_sub(&rhs)?.comps, lhs.max_abs().max(rhs.max_abs()));
            }
        }
    }
    Ok(out)
}

/// The Lie algebra cocycle `cᵢ(X_f) = (D^{i+2} f) α^{i/2}` (N = 1).
pub fn lie_cocycle<S: Scalar>(f: &SuperJet<S>, i: usize) -> Result<Density<S>> {
    if f.n() != 1 {
        return Err(Error::MismatchedN(1, f.n()));
    }
    if !matches!(i, 0 | 1 | 3) {
        return Err(Error::Precondition(format!("no Lie cocycle c_{i}")));
    }
    Ok(Density::new(i as i64, f.d_seq(&vec![0; i + 2])?))
}

/// The classical cocycles of a germ of the circle.
#[derive(Clone, Debug)]
pub struct ClassicalCocycles<S: Scalar> {
    /// `log f′`.
    pub euclid: LogJet<S>,
    /// The `dx` coefficient `f″/f′`.
    pub affine: SuperJet<S>,
    /// `1/6 S₀(f)`, the `dx²` coefficient.
    pub projective: SuperJet<S>,
}

pub fn classical_cocycles<S: Scalar>(f: &SuperJet<S>) -> Result<ClassicalCocycles<S>> {
    let f1 = f.dx();
    Ok(ClassicalCocycles {
        euclid: LogJet::of(&f1)?,
        affine: f1.dx().div(&f1)?,
        projective: schwarzian_s0(f)?.scale(&S::from_ratio(1, 6)),
    })
}

/// The images of `E(Φ)`, `A(Φ)`, `S(Φ)` under `π` (`ξ ↦ 0`, souls dropped,
/// `α ↦ dx`, `β ↦ 0`) for an N = 1 germ.
pub fn reduce_to_circle<S: Scalar>(germ: &MapGerm<S>, tol: f64) -> Result<ClassicalCocycles<S>> {
    requires_n(germ, 1)?;
    Ok(ClassicalCocycles {
        euclid: log_multiplier(germ, tol)?.reduce_body(),
        affine: cocycle_a(germ, tol)?.alpha.reduce_body(),
        projective: quad_s1(germ, tol)?.aa().reduce_body(),
    })
}
