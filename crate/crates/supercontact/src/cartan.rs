//! Cartan expansions: even vector fields, their truncated flows, pairings
//! with forms, and order-by-order comparison of invariant ratios with the
//! Euclidean, affine and projective cocycles.
//!
//! Quantities depending on the flow parameter are `ε`-jets: N = 0 super-jets
//! in the variable ε based at 0, with Grassmann coefficients.

use rand::Rng;

use crate::cocycles::{self, OneForm, QuadBasis, QuadDiff};
use crate::contactmap::{MapGerm, SuperPoint};
use crate::error::{Error, Result};
use crate::grassmann::Grassmann;
use crate::random::{self, SeededRng};
use crate::scalar::Scalar;
use crate::superjet::SuperJet;

/// Order of the flow expansion used by the comparisons.
pub const FLOW_DEGREE: i32 = 4;

pub type EpsJet<S> = SuperJet<S>;

/// An even vector field `X = a ∂x + Σ gᵢ ∂ξᵢ`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField<S: Scalar> {
    pub a: SuperJet<S>,
    pub g: Vec<SuperJet<S>>,
}

impl<S: Scalar> VectorField<S> {
    pub fn new(a: SuperJet<S>, g: Vec<SuperJet<S>>) -> Result<Self> {
        if g.len() != a.n() {
            return Err(Error::MismatchedN(a.n(), g.len()));
        }
        if !a.is_even() {
            return Err(Error::NotEven("x-component of an even field"));
        }
        for gi in &g {
            if gi.n() != a.n() || gi.m() != a.m() || gi.base() != a.base() {
                return Err(Error::Precondition("field components live on different jet spaces".into()));
            }
            if !gi.is_odd() {
                return Err(Error::NotOdd("ξ-component of an even field"));
            }
        }
        Ok(VectorField { a, g })
    }

    /// `∂x`.
    pub fn d_dx(n: usize, m: u8, base: S, order: i32) -> Self {
        let z = SuperJet::zero(n, m, base.clone(), order);
        VectorField { a: SuperJet::one(n, m, base, order), g: vec![z; n] }
    }

    /// `x ∂x`.
    pub fn euler(n: usize, m: u8, base: S, order: i32) -> Self {
        let z = SuperJet::zero(n, m, base.clone(), order);
        VectorField { a: SuperJet::x(n, m, base, order), g: vec![z; n] }
    }

    /// The contact field of an even N = 1 Hamiltonian `f = a(x) + 2ξ b(x)`:
    /// `X_f = (a + ξb) ∂x + (b + ½ ξ a′) ∂ξ`, so that `e_{X_f} = f′`.
    pub fn hamiltonian(f: &SuperJet<S>) -> Result<Self> {
        if f.n() != 1 {
            return Err(Error::MismatchedN(1, f.n()));
        }
        if !f.is_even() {
            return Err(Error::NotEven("contact Hamiltonian"));
        }
        let (a, b) = split_xi(f)?;
        let b = b.scale(&S::from_ratio(1, 2));
        let x_comp = a.checked_add(&b.mul_xi(0)?)?;
        let xi_comp = b.checked_add(&a.dx().mul_xi(0)?.scale(&S::from_ratio(1, 2)))?;
        Self::new(x_comp, vec![xi_comp])
    }

    pub fn n(&self) -> usize {
        self.g.len()
    }

    pub fn m(&self) -> u8 {
        self.a.m()
    }

    pub fn base(&self) -> &S {
        self.a.base()
    }

    /// `X f = a f′ + Σ gᵢ ∂ξᵢ f`.
    pub fn apply(&self, f: &SuperJet<S>) -> Result<SuperJet<S>> {
        let mut out = self.a.checked_mul(&f.dx())?;
        for (i, gi) in self.g.iter().enumerate() {
            out = out.checked_add(&gi.checked_mul(&f.dxi(i)?)?)?;
        }
        Ok(out)
    }

    /// `a′ + Σ ξᵢ gᵢ′`, the multiplier of `Id + εX` to first order when `X`
    /// is contact.
    pub fn infinitesimal_multiplier(&self) -> Result<SuperJet<S>> {
        let mut e = self.a.dx();
        for (i, gi) in self.g.iter().enumerate() {
            e = e.checked_add(&gi.dx().mul_xi(i)?)?;
        }
        Ok(e)
    }

    /// `Dᵢa − gᵢ − Σⱼ ξⱼ Dᵢgⱼ` for each i: zero exactly for contact fields.
    pub fn contact_defects(&self) -> Result<Vec<SuperJet<S>>> {
        (0..self.n())
            .map(|i| {
                let mut r = self.a.d(i)?.checked_sub(&self.g[i])?;
                for (j, gj) in self.g.iter().enumerate() {
                    r = r.checked_sub(&gj.d(i)?.mul_xi(j)?)?;
                }
                Ok(r)
            })
            .collect()
    }

    /// `Id + λX` for an even nilpotent constant `λ` with `λ² = 0`.
    pub fn nilpotent_flow(&self, lambda: &Grassmann<S>, tol: f64) -> Result<MapGerm<S>> {
        if !lambda.is_even() || !lambda.checked_mul(lambda)?.is_zero() {
            return Err(Error::Precondition("flow parameter must be even with square zero".into()));
        }
        let (n, m, base, order) = (self.n(), self.m(), self.base().clone(), self.a.order());
        let phi = SuperJet::x(n, m, base.clone(), order).checked_add(&self.a.left_mul(lambda))?;
        let psi = (0..n)
            .map(|i| SuperJet::xi(n, m, base.clone(), order, i)?.checked_add(&self.g[i].left_mul(lambda)))
            .collect::<Result<_>>()?;
        MapGerm::new(phi, psi)?.certify(tol)
    }
}

/// `f = f₀ + ξ f₁` for N = 1, as a pair of N = 1 jets free of ξ.
fn split_xi<S: Scalar>(f: &SuperJet<S>) -> Result<(SuperJet<S>, SuperJet<S>)> {
    let mut f0 = SuperJet::zero(1, f.m(), f.base().clone(), f.order());
    let mut f1 = f0.clone();
    for j in 0..=f.order().max(0) as usize {
        f0.set(0, j, f.coeff(0, j));
        f1.set(0, j, f.coeff(1, j));
    }
    Ok((f0, f1))
}

/// A random jet of the given total parity: polynomial of degree ≤ `degree`
/// in `h` with generic coefficients in every ξ-monomial.
pub fn random_jet<S: Scalar>(
    rng: &mut SeededRng,
    n: usize,
    m: u8,
    base: S,
    order: i32,
    degree: usize,
    odd: bool,
) -> Result<SuperJet<S>> {
    let mut terms = Vec::new();
    for mask in 0..1u32 << n {
        let coeff_odd = odd ^ (mask.count_ones() % 2 == 1);
        for j in 0..=degree {
            let c = if coeff_odd {
                if m == 0 {
                    continue;
                }
                random::odd_constant(rng, m)
            } else if rng.gen_bool(0.5) {
                let body = random::small_rational(rng, 2);
                random::even_constant(rng, m, body)
            } else {
                Grassmann::scalar(m, random::small_rational(rng, 2))
            };
            terms.push((mask, j, c));
        }
    }
    SuperJet::from_terms(n, m, base, order, terms)
}

/// A random even field whose `x`-component has non-zero body at the base.
pub fn random_field<S: Scalar>(rng: &mut SeededRng, n: usize, m: u8, base: S, order: i32) -> Result<VectorField<S>> {
    let mut a = random_jet(rng, n, m, base.clone(), order, 3, false)?;
    let lead = random::nonzero_rational::<S>(rng, 3);
    let c = a.coeff(0, 0).soul().checked_add(&Grassmann::scalar(m, lead))?;
    a.set(0, 0, c);
    let g = (0..n).map(|_| random_jet(rng, n, m, base.clone(), order, 3, true)).collect::<Result<_>>()?;
    VectorField::new(a, g)
}

/// A point with `ε`-jet coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsPoint<S: Scalar> {
    pub x: EpsJet<S>,
    pub xi: Vec<EpsJet<S>>,
}

impl<S: Scalar> EpsPoint<S> {
    /// The coordinates' values at `ε = 0`.
    pub fn at_zero(&self) -> SuperPoint<S> {
        SuperPoint { x: self.x.coeff(0, 0), xi: self.xi.iter().map(|c| c.coeff(0, 0)).collect() }
    }
}

/// `tᵢ = φ_{(i−1)ε}(t₁)` for `i = 1..=count`, through `ε^degree`:
/// `u(φ_s(t)) = Σₖ sᵏ/k! (Xᵏu)(t)` for every coordinate `u`.
pub fn eps_flow<S: Scalar>(
    field: &VectorField<S>,
    t1: &SuperPoint<S>,
    count: usize,
    degree: i32,
    tol: f64,
) -> Result<Vec<EpsPoint<S>>> {
    if t1.n() != field.n() {
        return Err(Error::MismatchedN(field.n(), t1.n()));
    }
    field.a.require_order(degree)?;
    let (n, m, base, order) = (field.n(), field.m(), field.base().clone(), field.a.order());
    let mut coords = vec![SuperJet::x(n, m, base.clone(), order)];
    for i in 0..n {
        coords.push(SuperJet::xi(n, m, base.clone(), order, i)?);
    }
    let mut series: Vec<Vec<Grassmann<S>>> = Vec::with_capacity(coords.len());
    for u in coords {
        let mut vals = Vec::with_capacity(degree as usize + 1);
        let mut cur = u;
        for k in 0..=degree {
            if k > 0 {
                cur = field.apply(&cur)?;
            }
            vals.push(cur.eval(&t1.x, &t1.xi, tol)?);
        }
        series.push(vals);
    }
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let s = S::from_i64(i as i64);
        let jets: Vec<EpsJet<S>> = series
            .iter()
            .map(|vals| {
                let mut jet = SuperJet::zero(0, m, S::zero(), degree);
                let mut sk = S::one();
                let mut fact = S::one();
                for (k, v) in vals.iter().enumerate() {
                    if k > 0 {
                        sk = sk.mul(&s);
                        fact = fact.mul(&S::from_i64(k as i64));
                    }
                    jet.set(0, k, v.scale(&sk.mul(&fact.inv().expect("k! > 0"))));
                }
                jet
            })
            .collect();
        out.push(EpsPoint { x: jets[0].clone(), xi: jets[1..].to_vec() });
    }
    Ok(out)
}

/// `[p, q] = x_q − x_p − ξ_q·ξ_p` on `ε`-points.
pub fn eps_bracket<S: Scalar>(p: &EpsPoint<S>, q: &EpsPoint<S>) -> Result<EpsJet<S>> {
    let mut b = q.x.checked_sub(&p.x)?;
    for (a, c) in q.xi.iter().zip(&p.xi) {
        b = b.checked_sub(&a.checked_mul(c)?)?;
    }
    Ok(b)
}

/// `{p, q} = ξ_q − ξ_p` on `ε`-points.
pub fn eps_odd_bracket<S: Scalar>(p: &EpsPoint<S>, q: &EpsPoint<S>) -> Result<Vec<EpsJet<S>>> {
    q.xi.iter().zip(&p.xi).map(|(a, c)| a.checked_sub(c)).collect()
}

/// The image `Φ(t)` of an `ε`-point.
pub fn eps_image<S: Scalar>(germ: &MapGerm<S>, p: &EpsPoint<S>, tol: f64) -> Result<EpsPoint<S>> {
    let (x, xi) = germ.eval_jets(&p.x, &p.xi, tol)?;
    Ok(EpsPoint { x, xi })
}

/// `⟨X, α⟩ = a + Σ ξᵢ gᵢ` and `⟨X, βⁱ⟩ = gᵢ`, as jets.
fn basis_pairings<S: Scalar>(field: &VectorField<S>) -> Result<(SuperJet<S>, Vec<SuperJet<S>>)> {
    let mut pa = field.a.clone();
    for (i, gi) in field.g.iter().enumerate() {
        pa = pa.checked_add(&gi.mul_xi(i)?)?;
    }
    Ok((pa, field.g.clone()))
}

/// `⟨X, ω⟩` evaluated at `t`.
pub fn pair_oneform<S: Scalar>(field: &VectorField<S>, w: &OneForm<S>, t: &SuperPoint<S>, tol: f64) -> Result<Grassmann<S>> {
    let (pa, pb) = basis_pairings(field)?;
    let mut jet = pa.checked_mul(&w.alpha)?;
    for (p, c) in pb.iter().zip(&w.beta) {
        jet = jet.checked_add(&p.checked_mul(c)?)?;
    }
    jet.eval(&t.x, &t.xi, tol)
}

/// `⟨X⊗X, Q⟩` evaluated at `t`, with `⟨X⊗X, e e′ c⟩ = ⟨X,e⟩⟨X,e′⟩ c` on the
/// ordered basis products.
pub fn pair_quad<S: Scalar>(field: &VectorField<S>, q: &QuadDiff<S>, t: &SuperPoint<S>, tol: f64) -> Result<Grassmann<S>> {
    let (pa, pb) = basis_pairings(field)?;
    let mut jet: Option<SuperJet<S>> = None;
    for (b, c) in q.components() {
        let (x, y) = match b {
            QuadBasis::AlphaAlpha => (&pa, &pa),
            QuadBasis::AlphaBeta(i) => (&pa, &pb[i]),
            QuadBasis::BetaBeta(i, j) => (&pb[i], &pb[j]),
        };
        let term = x.checked_mul(y)?.checked_mul(c)?;
        jet = Some(match jet {
            None => term,
            Some(acc) => acc.checked_add(&term)?,
        });
    }
    jet.expect("the basis is never empty").eval(&t.x, &t.xi, tol)
}

/// Coefficients of the two sides of a Cartan expansion in powers of ε.
#[derive(Clone, Debug)]
pub struct EpsComparison<S: Scalar> {
    /// `ε⁰, ε¹, …` of the invariant side.
    pub lhs: Vec<Grassmann<S>>,
    /// The cocycle side through the compared order.
    pub rhs: Vec<Grassmann<S>>,
}

impl<S: Scalar> EpsComparison<S> {
    /// Number of compared coefficients.
    pub fn compared(&self) -> usize {
        self.rhs.len()
    }

    pub fn residuals(&self) -> Vec<Grassmann<S>> {
        self.lhs.iter().zip(&self.rhs).map(|(a, b)| a - b).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().iter().map(Grassmann::max_abs).fold(0.0, f64::max)
    }

    pub fn is_exact(&self) -> bool {
        self.lhs.len() >= self.rhs.len() && self.residuals().iter().all(Grassmann::is_zero)
    }

    /// Exact agreement, or agreement within `tol` relative to the largest
    /// coefficient on either side for floating scalars.
    pub fn holds(&self, tol: f64) -> bool {
        if S::EXACT {
            self.is_exact()
        } else {
            let scale = self.lhs.iter().chain(&self.rhs).map(Grassmann::max_abs).fold(1.0, f64::max);
            self.lhs.len() >= self.rhs.len() && self.max_residual() <= tol * scale
        }
    }
}

fn coeffs<S: Scalar>(j: &EpsJet<S>) -> Vec<Grassmann<S>> {
    (0..=j.order().max(-1)).map(|k| j.coeff(0, k as usize)).collect()
}

/// `[tᵢ, tⱼ] / ε`; the `ε⁰` term of a bracket of flowed points vanishes.
fn reduced_bracket<S: Scalar>(p: &EpsPoint<S>, q: &EpsPoint<S>, tol: f64) -> Result<EpsJet<S>> {
    let b = eps_bracket(p, q)?;
    let b = if S::EXACT || b.coeff(0, 0).max_abs() > tol { b } else {
        let mut c = b.clone();
        c.set(0, 0, Grassmann::zero(b.m()));
        c
    };
    b.div_h()
}

fn check_field<S: Scalar>(germ: &MapGerm<S>, field: &VectorField<S>, t1: &SuperPoint<S>) -> Result<()> {
    if field.n() != germ.n() || t1.n() != germ.n() {
        return Err(Error::MismatchedN(germ.n(), field.n()));
    }
    if t1.body() != *germ.base() || field.base() != germ.base() {
        return Err(Error::BaseMismatch(germ.base().to_literal(), t1.body().to_literal()));
    }
    if field.a.coeff(0, 0).body().is_zero() {
        return Err(Error::NonGeneric("X has vanishing x-component at the base".into()));
    }
    Ok(())
}

/// `Φ*[t₁,t₂]/[t₁,t₂]` against `E_Φ(t₁)` at order `ε⁰`.
pub fn cartan_euclid<S: Scalar>(germ: &MapGerm<S>, field: &VectorField<S>, t1: &SuperPoint<S>, tol: f64) -> Result<EpsComparison<S>> {
    check_field(germ, field, t1)?;
    let pts = eps_flow(field, t1, 2, FLOW_DEGREE, tol)?;
    let img: Vec<_> = pts.iter().map(|p| eps_image(germ, p, tol)).collect::<Result<_>>()?;
    let ratio = reduced_bracket(&img[0], &img[1], tol)?.div(&reduced_bracket(&pts[0], &pts[1], tol)?)?;
    let e = germ.multiplier(tol)?.eval(&t1.x, &t1.xi, tol)?;
    Ok(EpsComparison { lhs: coeffs(&ratio), rhs: vec![e] })
}

/// `(Φ*[t₁,t₃]/Φ*[t₁,t₂]) / ([t₁,t₃]/[t₁,t₂]) − 1` against `½⟨εX, A(Φ)⟩(t₁)`
/// through order `ε¹`.
pub fn cartan_affine<S: Scalar>(germ: &MapGerm<S>, field: &VectorField<S>, t1: &SuperPoint<S>, tol: f64) -> Result<EpsComparison<S>> {
    check_field(germ, field, t1)?;
    let pts = eps_flow(field, t1, 3, FLOW_DEGREE, tol)?;
    let img: Vec<_> = pts.iter().map(|p| eps_image(germ, p, tol)).collect::<Result<_>>()?;
    let inv = |p: &[EpsPoint<S>]| -> Result<EpsJet<S>> {
        reduced_bracket(&p[0], &p[2], tol)?.div(&reduced_bracket(&p[0], &p[1], tol)?)
    };
    let ratio = inv(&img)?.div(&inv(&pts)?)?;
    let lhs = ratio.add_constant(&Grassmann::scalar(germ.m(), S::one().neg()));
    let a = cocycles::cocycle_a(germ, tol)?;
    let half = pair_oneform(field, &a, t1, tol)?.scale(&S::from_ratio(1, 2));
    Ok(EpsComparison { lhs: coeffs(&lhs), rhs: vec![Grassmann::zero(germ.m()), half] })
}

/// The cross-ratio `[t₁,t₃][t₂,t₄]/([t₂,t₃][t₁,t₄])` of `ε`-points, with the
/// common factor `ε²` cancelled.
pub fn eps_cross_ratio<S: Scalar>(p: &[EpsPoint<S>], tol: f64) -> Result<EpsJet<S>> {
    let b = |i: usize, j: usize| reduced_bracket(&p[i], &p[j], tol);
    let num = b(0, 2)?.checked_mul(&b(1, 3)?)?;
    let den = b(1, 2)?.checked_mul(&b(0, 3)?)?;
    num.div(&den)
}

/// `Φ*CR/CR − 1` against `⟨εX⊗εX, S(Φ)⟩(t₁)` through order `ε²`, for N = 0, 1, 2.
pub fn cartan_projective<S: Scalar>(
    germ: &MapGerm<S>,
    field: &VectorField<S>,
    t1: &SuperPoint<S>,
    tol: f64,
) -> Result<EpsComparison<S>> {
    check_field(germ, field, t1)?;
    let s = cocycles::quad_schwarzian(germ, tol)?;
    let pts = eps_flow(field, t1, 4, FLOW_DEGREE, tol)?;
    let img: Vec<_> = pts.iter().map(|p| eps_image(germ, p, tol)).collect::<Result<_>>()?;
    let ratio = eps_cross_ratio(&img, tol)?.div(&eps_cross_ratio(&pts, tol)?)?;
    let lhs = ratio.add_constant(&Grassmann::scalar(germ.m(), S::one().neg()));
    let zero = Grassmann::zero(germ.m());
    let rhs = vec![zero.clone(), zero, pair_quad(field, &s, t1, tol)?];
    Ok(EpsComparison { lhs: coeffs(&lhs), rhs })
}

/// `[t₁,t₂] − ⟨εX,α⟩(t₁)` and `{t₁,t₂} − ⟨εX,β⟩(t₁)` through order ε¹.
pub fn discrete_variation_residuals<S: Scalar>(field: &VectorField<S>, t1: &SuperPoint<S>, tol: f64) -> Result<Vec<Grassmann<S>>> {
    let pts = eps_flow(field, t1, 2, 2, tol)?;
    let (pa, pb) = basis_pairings(field)?;
    let mut out = Vec::new();
    let b = eps_bracket(&pts[0], &pts[1])?;
    out.push(b.coeff(0, 0));
    out.push(&b.coeff(0, 1) - &pa.eval(&t1.x, &t1.xi, tol)?);
    for (ob, g) in eps_odd_bracket(&pts[0], &pts[1])?.iter().zip(&pb) {
        out.push(ob.coeff(0, 0));
        out.push(&ob.coeff(0, 1) - &g.eval(&t1.x, &t1.xi, tol)?);
    }
    Ok(out)
}

/// The N = 3 germ `(x + ξ₁ξ₂ξ₃λ, ξ − (ξ₂ξ₃, ξ₃ξ₁, ξ₁ξ₂)λ)` for odd `λ`.
pub fn n3_witness<S: Scalar>(base: S, order: i32, lambda: &Grassmann<S>, tol: f64) -> Result<MapGerm<S>> {
    if !lambda.is_odd() {
        return Err(Error::NotOdd("λ"));
    }
    let m = lambda.m();
    let xi: Vec<SuperJet<S>> = (0..3).map(|i| SuperJet::xi(3, m, base.clone(), order, i)).collect::<Result<_>>()?;
    let phi = SuperJet::x(3, m, base.clone(), order)
        .checked_add(&xi[0].checked_mul(&xi[1])?.checked_mul(&xi[2])?.right_mul(lambda))?;
    let pairs = [(1, 2), (2, 0), (0, 1)];
    let psi = (0..3)
        .map(|i| {
            let (j, k) = pairs[i];
            xi[i].checked_sub(&xi[j].checked_mul(&xi[k])?.right_mul(lambda))
        })
        .collect::<Result<_>>()?;
    MapGerm::new(phi, psi)?.certify(tol)
}

/// The cubic coefficients `T_{ijk} = D_k D_j D_i φ − ψ·D_k D_j D_i ψ` of an N = 3 germ.
#[derive(Clone, Debug)]
pub struct CubicObstruction<S: Scalar> {
    /// `T₁₂₃`.
    pub ordered: SuperJet<S>,
    /// `1/6 Σ_σ sgn(σ) T_{σ(1)σ(2)σ(3)}`, the `β¹β²β³` coefficient.
    pub antisymmetrized: SuperJet<S>,
}

pub fn cubic_obstruction<S: Scalar>(germ: &MapGerm<S>) -> Result<CubicObstruction<S>> {
    if germ.n() != 3 {
        return Err(Error::MismatchedN(3, germ.n()));
    }
    let t = |idx: [usize; 3]| -> Result<SuperJet<S>> {
        let mut r = germ.phi().d_seq(&idx)?;
        for p in germ.psi() {
            r = r.checked_sub(&p.checked_mul(&p.d_seq(&idx)?)?)?;
        }
        Ok(r)
    };
    let perms: [([usize; 3], i64); 6] =
        [([0, 1, 2], 1), ([1, 2, 0], 1), ([2, 0, 1], 1), ([1, 0, 2], -1), ([0, 2, 1], -1), ([2, 1, 0], -1)];
    let ordered = t([0, 1, 2])?;
    let mut anti = SuperJet::zero(3, germ.m(), germ.base().clone(), ordered.order());
    for (p, s) in perms {
        anti = anti.checked_add(&t(p)?.scale(&S::from_i64(s)))?;
    }
    Ok(CubicObstruction { ordered, antisymmetrized: anti.scale(&S::from_ratio(1, 6)) })
}

/// `C(Id + εX_f) − κᵢ ε cᵢ(X_f)` with `κ = (1, 1, ¼)` for `i = 0, 1, 3`; `ε`
/// is an even nilpotent constant not involved in `f`.
pub fn lie_vs_group<S: Scalar>(f: &SuperJet<S>, i: usize, eps: &Grassmann<S>, tol: f64) -> Result<SuperJet<S>> {
    let field = VectorField::hamiltonian(f)?;
    let flow = field.nilpotent_flow(eps, tol)?;
    let (group, kappa) = match i {
        0 => {
            let l = cocycles::log_multiplier(&flow, tol)?;
            if l.body != S::one() {
                return Err(Error::Disagreement("flow multiplier has body ≠ 1".into()));
            }
            (l.rest, S::one())
        }
        1 => (cocycles::cocycle_a_proj(&flow, tol)?.coeff, S::one()),
        3 => (cocycles::schwarzian_s1(&flow, tol)?.coeff, S::from_ratio(1, 4)),
        _ => return Err(Error::Precondition(format!("no Lie cocycle c_{i}"))),
    };
    let lie = cocycles::lie_cocycle(f, i)?.coeff.left_mul(eps).scale(&kappa);
    group.checked_sub(&lie)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contactmap::random_k1;
    use crate::scalar::Rational;

    type Q = Rational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    #[test]
    fn translation_flow() {
        let x = VectorField::<Q>::d_dx(0, 0, q(0, 1), 5);
        let pts = eps_flow(&x, &SuperPoint::origin(0, 0), 4, 3, 0.0).unwrap();
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(p.x.coeff(0, 0).body(), q(0, 1));
            assert_eq!(p.x.coeff(0, 1).body(), q(i as i64, 1));
            assert!(p.x.coeff(0, 2).is_zero());
        }
    }

    #[test]
    fn euler_flow_is_exponential() {
        let x = VectorField::<Q>::euler(1, 0, q(1, 1), 5);
        let t1 = SuperPoint::new(Grassmann::one(0), vec![Grassmann::zero(0)]).unwrap();
        let pts = eps_flow(&x, &t1, 2, 3, 0.0).unwrap();
        let got: Vec<Q> = (0..4).map(|k| pts[1].x.coeff(0, k).body()).collect();
        assert_eq!(got, vec![q(1, 1), q(1, 1), q(1, 2), q(1, 6)]);
    }

    #[test]
    fn hamiltonian_multiplier_is_f_prime() {
        let mut rng = random::rng(3);
        let f = random_jet::<Q>(&mut rng, 1, 4, q(0, 1), 6, 3, false).unwrap();
        let x = VectorField::hamiltonian(&f).unwrap();
        assert!(x.infinitesimal_multiplier().unwrap().agrees(&f.dx()));
        assert!(x.contact_defects().unwrap().iter().all(SuperJet::is_zero));
    }

    #[test]
    fn pairing_examples() {
        let x = VectorField::<Q>::d_dx(1, 2, q(0, 1), 4);
        let t = SuperPoint::origin(1, 2);
        let a = OneForm::alpha_basis(1, &SuperJet::one(1, 2, q(0, 1), 4));
        let b = OneForm::beta_basis(0, &SuperJet::one(1, 2, q(0, 1), 4));
        assert_eq!(pair_oneform(&x, &a, &t, 0.0).unwrap(), Grassmann::one(2));
        assert!(pair_oneform(&x, &b, &t, 0.0).unwrap().is_zero());
        let s0 = Grassmann::scalar(2, q(5, 1));
        let mut qd = QuadDiff::zero_like(1, &SuperJet::one(1, 2, q(0, 1), 4));
        qd.set(QuadBasis::AlphaAlpha, SuperJet::constant(1, q(0, 1), 4, s0.clone()));
        assert_eq!(pair_quad(&x, &qd, &t, 0.0).unwrap(), s0);
    }

    #[test]
    fn beta_beta_pairing_is_antisymmetric_product() {
        let m = 2;
        let g1 = Grassmann::<Q>::generator(m, 0).unwrap();
        let g2 = Grassmann::<Q>::generator(m, 1).unwrap();
        let base = q(0, 1);
        let c = |g: &Grassmann<Q>| SuperJet::constant(2, base.clone(), 3, g.clone());
        let x = VectorField::new(SuperJet::one(2, m, base.clone(), 3), vec![c(&g1), c(&g2)]).unwrap();
        let mut qd = QuadDiff::zero_like(2, &SuperJet::one(2, m, base.clone(), 3));
        qd.set(QuadBasis::BetaBeta(0, 1), SuperJet::one(2, m, base, 3));
        let t = SuperPoint::origin(2, m);
        assert_eq!(pair_quad(&x, &qd, &t, 0.0).unwrap(), &g1 * &g2);
    }

    #[test]
    fn x_squared_cartan_coefficient() {
        let f = SuperJet::<Q>::from_h_poly(0, 0, q(1, 1), 8, &[q(1, 1), q(2, 1), q(1, 1)]);
        let germ = MapGerm::new(f, vec![]).unwrap().certify(0.0).unwrap();
        let x = VectorField::d_dx(0, 0, q(1, 1), 8);
        let t1 = SuperPoint::new(Grassmann::one(0), vec![]).unwrap();
        let c = cartan_projective(&germ, &x, &t1, 0.0).unwrap();
        assert!(c.is_exact());
        assert_eq!(c.lhs[2].body(), q(-1, 4));
        assert_eq!(c.lhs[2].body().mul(&q(6, 1)), q(-3, 2));
    }

    #[test]
    fn cartan_n1_random() {
        let mut rng = random::rng(9);
        let germ = random_k1::<Q>(&mut rng, 4, q(0, 1), 6, 3).unwrap();
        let x = random_field(&mut rng, 1, 4, q(0, 1), 6).unwrap();
        let t1 = SuperPoint::new(Grassmann::zero(4), vec![random::odd_constant(&mut rng, 4)]).unwrap();
        let p = cartan_projective(&germ, &x, &t1, 0.0).unwrap();
        assert!(p.is_exact(), "{:?}", p.residuals());
        assert!(!p.lhs[2].is_zero());
        assert!(cartan_euclid(&germ, &x, &t1, 0.0).unwrap().is_exact());
        assert!(cartan_affine(&germ, &x, &t1, 0.0).unwrap().is_exact());
    }

    #[test]
    fn discrete_variations() {
        let mut rng = random::rng(2);
        let x = random_field::<Q>(&mut rng, 2, 4, q(1, 1), 5).unwrap();
        let t1 = SuperPoint::new(Grassmann::one(4), vec![random::odd_constant(&mut rng, 4), random::odd_constant(&mut rng, 4)]).unwrap();
        assert!(discrete_variation_residuals(&x, &t1, 0.0).unwrap().iter().all(Grassmann::is_zero));
    }

    #[test]
    fn witness_obstruction_nonzero() {
        let lambda = Grassmann::<Q>::generator(2, 0).unwrap();
        let w = n3_witness(q(0, 1), 4, &lambda, 0.0).unwrap();
        let c = cubic_obstruction(&w).unwrap();
        assert!(!c.antisymmetrized.is_zero());
        let id = MapGerm::<Q>::identity(3, 2, q(0, 1), 4);
        assert!(cubic_obstruction(&id).unwrap().antisymmetrized.is_zero());
    }

    #[test]
    fn lie_cocycles_match_group() {
        let m = 4;
        let eps = &Grassmann::<Q>::generator(m, 2).unwrap() * &Grassmann::generator(m, 3).unwrap();
        let th = Grassmann::<Q>::generator(m, 0).unwrap();
        let x = SuperJet::<Q>::x(1, m, q(0, 1), 8);
        let xi = SuperJet::<Q>::xi(1, m, q(0, 1), 8, 0).unwrap();
        let h = SuperJet::<Q>::h(1, m, q(0, 1), 8);
        let f = &(&x * &x) + &(&xi * &h.pow(2)).right_mul(&th);
        for i in [0, 1, 3] {
            assert!(lie_vs_group(&f, i, &eps, 0.0).unwrap().is_zero(), "c_{i}");
        }
    }
}
