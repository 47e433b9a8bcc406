//! Germs of superdiffeomorphisms `Φ = (φ, ψ¹…ψᴺ)` and the contact condition
//! `Dᵢφ = Σⱼ ψʲ Dᵢψʲ`.
//!
//! Every germ is based at a soul-free point `(x₀, 0)`; its jets share that
//! base. Souls enter through the coefficients only.

use rand::Rng;

use crate::error::{Error, Result};
use crate::grassmann::Grassmann;
use crate::ospgroup::{self, OspMatrix};
use crate::random::{self, SeededRng};
use crate::scalar::Scalar;
use crate::superjet::SuperJet;

/// A point of the supercircle with Grassmann-valued coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperPoint<S: Scalar> {
    pub x: Grassmann<S>,
    pub xi: Vec<Grassmann<S>>,
}

impl<S: Scalar> SuperPoint<S> {
    pub fn new(x: Grassmann<S>, xi: Vec<Grassmann<S>>) -> Result<Self> {
        if !x.is_even() {
            return Err(Error::NotEven("point x-coordinate"));
        }
        for c in &xi {
            if c.m() != x.m() {
                return Err(Error::MismatchedGenerators(x.m(), c.m()));
            }
            if !c.is_odd() {
                return Err(Error::NotOdd("point ξ-coordinate"));
            }
        }
        Ok(SuperPoint { x, xi })
    }

    pub fn origin(n: usize, m: u8) -> Self {
        SuperPoint { x: Grassmann::zero(m), xi: vec![Grassmann::zero(m); n] }
    }

    pub fn n(&self) -> usize {
        self.xi.len()
    }

    pub fn m(&self) -> u8 {
        self.x.m()
    }

    pub fn body(&self) -> S {
        self.x.body()
    }

    /// Distinct points have distinct bodies of `x`.
    pub fn distinct(&self, other: &Self) -> bool {
        self.body() != other.body()
    }

    pub fn max_abs(&self) -> f64 {
        self.xi.iter().map(Grassmann::max_abs).fold(self.x.max_abs(), f64::max)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(SuperPoint {
            x: self.x.checked_sub(&other.x)?,
            xi: self.xi.iter().zip(&other.xi).map(|(a, b)| a.checked_sub(b)).collect::<Result<_>>()?,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapGerm<S: Scalar> {
    phi: SuperJet<S>,
    psi: Vec<SuperJet<S>>,
    certified: bool,
}

impl<S: Scalar> MapGerm<S> {
    pub fn new(phi: SuperJet<S>, psi: Vec<SuperJet<S>>) -> Result<Self> {
        if psi.len() != phi.n() {
            return Err(Error::MismatchedN(phi.n(), psi.len()));
        }
        if !phi.is_even() {
            return Err(Error::NotEven("φ"));
        }
        for p in &psi {
            if p.n() != phi.n() {
                return Err(Error::MismatchedN(phi.n(), p.n()));
            }
            if p.m() != phi.m() {
                return Err(Error::MismatchedGenerators(phi.m(), p.m()));
            }
            if p.base() != phi.base() {
                return Err(Error::BaseMismatch(phi.base().to_literal(), p.base().to_literal()));
            }
            if !p.is_odd() {
                return Err(Error::NotOdd("ψ"));
            }
        }
        if phi.order() < 1 || phi.coeff(0, 1).body().is_zero() {
            return Err(Error::Precondition("φ′ has zero body at the base".into()));
        }
        Ok(MapGerm { phi, psi, certified: false })
    }

    pub fn identity(n: usize, m: u8, base: S, order: i32) -> Self {
        let phi = SuperJet::x(n, m, base.clone(), order);
        let psi = (0..n).map(|i| SuperJet::xi(n, m, base.clone(), order, i).expect("index in range")).collect();
        MapGerm { phi, psi, certified: true }
    }

    pub fn n(&self) -> usize {
        self.phi.n()
    }

    pub fn m(&self) -> u8 {
        self.phi.m()
    }

    pub fn base(&self) -> &S {
        self.phi.base()
    }

    pub fn order(&self) -> i32 {
        self.psi.iter().fold(self.phi.order(), |o, p| o.min(p.order()))
    }

    pub fn phi(&self) -> &SuperJet<S> {
        &self.phi
    }

    pub fn psi(&self) -> &[SuperJet<S>] {
        &self.psi
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// The image of the base point `(x₀, 0)`.
    pub fn image_base(&self) -> SuperPoint<S> {
        SuperPoint { x: self.phi.coeff(0, 0), xi: self.psi.iter().map(|p| p.coeff(0, 0)).collect() }
    }

    pub fn truncate(&self, order: i32) -> Self {
        MapGerm {
            phi: self.phi.truncate(order),
            psi: self.psi.iter().map(|p| p.truncate(order)).collect(),
            certified: self.certified,
        }
    }

    /// `self ∘ inner`; the body of `inner`'s image base must equal `self.base()`.
    pub fn compose(&self, inner: &MapGerm<S>, tol: f64) -> Result<Self> {
        if self.n() != inner.n() {
            return Err(Error::MismatchedN(self.n(), inner.n()));
        }
        let phi = self.phi.compose(&inner.phi, &inner.psi, tol)?;
        let psi = self.psi.iter().map(|p| p.compose(&inner.phi, &inner.psi, tol)).collect::<Result<_>>()?;
        Ok(MapGerm { phi, psi, certified: self.certified && inner.certified })
    }

    /// Pullback `Φ*f = f ∘ Φ` of a jet based at the image body.
    pub fn pullback(&self, f: &SuperJet<S>, tol: f64) -> Result<SuperJet<S>> {
        f.compose(&self.phi, &self.psi, tol)
    }

    /// `Dᵢφ − Σⱼ ψʲ Dᵢψʲ` for each i.
    pub fn contact_residuals(&self) -> Result<Vec<SuperJet<S>>> {
        (0..self.n())
            .map(|i| {
                let mut r = self.phi.d(i)?;
                for p in &self.psi {
                    r = r.checked_sub(&p.truncate(p.order() - 1).checked_mul(&p.d(i)?)?)?;
                }
                Ok(r)
            })
            .collect()
    }

    /// Square of the largest coefficient magnitude (at least 1); floating
    /// tolerances on quadratic quantities are taken relative to it.
    pub fn scale(&self) -> f64 {
        let c = self.psi.iter().map(SuperJet::max_abs).fold(self.phi.max_abs(), f64::max).max(1.0);
        c * c
    }

    pub fn max_residual(&self) -> Result<f64> {
        Ok(self.contact_residuals()?.iter().map(SuperJet::max_abs).fold(0.0, f64::max))
    }

    /// Marks the germ as contact after checking every residual vanishes
    /// (exactly, or within `tol` for floating scalars).
    pub fn certify(mut self, tol: f64) -> Result<Self> {
        let r = self.max_residual()?;
        let ok = if S::EXACT { r == 0.0 && self.contact_residuals()?.iter().all(SuperJet::is_zero) } else { r <= tol * self.scale() };
        if !ok {
            return Err(Error::NotContact(format!("{r:e}")));
        }
        self.certified = true;
        Ok(self)
    }

    /// The multiplier `E_Φ` with `Φ*α = E_Φ α`, cross-checked as
    /// `φ′ + ψ·ψ′` and `Σⱼ (Dᵢψʲ)²` for every i.
    pub fn multiplier(&self, tol: f64) -> Result<SuperJet<S>> {
        if !self.certified {
            return Err(Error::NotCertified);
        }
        let mut e = self.phi.dx();
        for p in &self.psi {
            e = e.checked_add(&p.checked_mul(&p.dx())?)?;
        }
        for i in 0..self.n() {
            let mut alt = SuperJet::zero(self.n(), self.m(), self.base().clone(), e.order());
            for p in &self.psi {
                let dp = p.d(i)?;
                alt = alt.checked_add(&dp.checked_mul(&dp)?)?;
            }
            let diff = e.checked_sub(&alt)?;
            if !(diff.is_zero() || (!S::EXACT && diff.max_abs() <= tol * self.scale())) {
                return Err(Error::Disagreement(format!("multiplier forms differ in direction {}", i + 1)));
            }
        }
        if !e.coeff(0, 0).body().is_positive() {
            return Err(Error::Precondition("multiplier body is not positive".into()));
        }
        Ok(e)
    }

    /// Evaluates the germ at a point whose x-body equals the base.
    pub fn eval(&self, p: &SuperPoint<S>, tol: f64) -> Result<SuperPoint<S>> {
        Ok(SuperPoint {
            x: self.phi.eval(&p.x, &p.xi, tol)?,
            xi: self.psi.iter().map(|q| q.eval(&p.x, &p.xi, tol)).collect::<Result<_>>()?,
        })
    }

    /// Evaluates on coordinates that are themselves jets (e.g. in ε).
    pub fn eval_jets(&self, x: &SuperJet<S>, xi: &[SuperJet<S>], tol: f64) -> Result<(SuperJet<S>, Vec<SuperJet<S>>)> {
        Ok((self.phi.compose(x, xi, tol)?, self.psi.iter().map(|q| q.compose(x, xi, tol)).collect::<Result<_>>()?))
    }

    /// The underlying germ of the circle: `f = π(φ)`.
    pub fn reduce_body(&self) -> SuperJet<S> {
        self.phi.reduce_body()
    }
}

/// Floating tolerance for germs that are contact by construction.
const BUILT_TOL: f64 = 1e-9;

/// `(x + b − β·ξ, β + ξ)`.
pub fn translation<S: Scalar>(base: S, order: i32, b: &Grassmann<S>, beta: &[Grassmann<S>]) -> Result<MapGerm<S>> {
    let (n, m) = (beta.len(), b.m());
    let mut phi = SuperJet::x(n, m, base.clone(), order).add_constant(b);
    let mut psi = Vec::with_capacity(n);
    for (i, bi) in beta.iter().enumerate() {
        let xi = SuperJet::xi(n, m, base.clone(), order, i)?;
        phi = phi.checked_sub(&xi.left_mul(bi))?;
        psi.push(xi.add_constant(bi));
    }
    MapGerm::new(phi, psi)?.certify(BUILT_TOL)
}

/// `(a²x, aξ)`.
pub fn dilatation<S: Scalar>(n: usize, m: u8, base: S, order: i32, a: &S) -> Result<MapGerm<S>> {
    let phi = SuperJet::x(n, m, base.clone(), order).scale(&a.mul(a));
    let psi = (0..n).map(|i| Ok(SuperJet::xi(n, m, base.clone(), order, i)?.scale(a))).collect::<Result<_>>()?;
    MapGerm::new(phi, psi)?.certify(BUILT_TOL)
}

/// The K(1) germ `(φ₀ + ξφ₁, ψ₁ + ξψ₀)` determined by `ψ₀` (even) and `ψ₁`
/// (odd), both N = 0 jets, with `φ₀′ = ψ₀² − ψ₁ψ₁′`, `φ₁ = ψ₀ψ₁`, `φ₀(x₀) = c`.
pub fn contact_from_psi<S: Scalar>(psi0: &SuperJet<S>, psi1: &SuperJet<S>, c: &Grassmann<S>) -> Result<MapGerm<S>> {
    if psi0.n() != 0 || psi1.n() != 0 {
        return Err(Error::Precondition("ψ₀ and ψ₁ must be functions of x alone".into()));
    }
    if !psi0.is_even() {
        return Err(Error::NotEven("ψ₀"));
    }
    if !psi1.is_odd() {
        return Err(Error::NotOdd("ψ₁"));
    }
    if !c.is_even() {
        return Err(Error::NotEven("φ₀(x₀)"));
    }
    if psi0.coeff(0, 0).body().is_zero() {
        return Err(Error::Precondition("ψ₀ vanishes at the base".into()));
    }
    let order = psi0.order().min(psi1.order());
    let (p0, p1) = (psi0.truncate(order), psi1.truncate(order));
    let integrand = p0.checked_mul(&p0)?.checked_sub(&p1.checked_mul(&p1.dx())?)?;
    let phi0 = integrand.antiderivative_x(c)?.truncate(order).with_odd(1)?;
    let phi1 = p0.checked_mul(&p1)?.with_odd(1)?;
    let phi = phi0.checked_add(&phi1.mul_xi(0)?)?;
    let psi = p1.with_odd(1)?.checked_add(&p0.with_odd(1)?.mul_xi(0)?)?;
    MapGerm::new(phi, vec![psi])?.certify(BUILT_TOL)
}

/// Random polynomial data for [`contact_from_psi`]: degree ≤ `degree`,
/// rational coefficients in [−3, 3], odd coefficients generic over the
/// algebra's generators.
pub fn random_k1<S: Scalar>(rng: &mut SeededRng, m: u8, base: S, order: i32, degree: usize) -> Result<MapGerm<S>> {
    let mut p0 = Vec::with_capacity(degree + 1);
    let mut p1 = Vec::with_capacity(degree + 1);
    for j in 0..=degree {
        let body = if j == 0 { random::nonzero_rational::<S>(rng, 3) } else { random::small_rational::<S>(rng, 3) };
        p0.push((0u32, j, if m >= 2 && rng.gen_bool(0.5) { random::even_constant(rng, m, body) } else { Grassmann::scalar(m, body) }));
        if m > 0 {
            p1.push((0u32, j, random::odd_constant(rng, m)));
        }
    }
    let psi0 = SuperJet::from_terms(0, m, base.clone(), order, p0)?;
    let psi1 = SuperJet::from_terms(0, m, base, order, p1)?;
    let c0 = random::small_rational(rng, 3);
    let c = random::even_constant(rng, m, c0);
    contact_from_psi(&psi0, &psi1, &c)
}

/// One building block of an N = 2 contact germ.
#[derive(Clone, Debug)]
pub enum K2Step<S: Scalar> {
    /// `(x, ξ) ↦ (g(x), √g′(x)·R(t)ξ)` with `g(x₀ + h) = x₀ + shift + Σ_{j≥1} g_j h^j`;
    /// `slope_root² = g₁` and `R(t)` the rational rotation of parameter `t`.
    Lift { shift: S, slope_root: S, higher: Vec<S>, t: S },
    /// The homographic action of an SpO(2|2) element.
    Homography(OspMatrix<S>),
    /// The exponential `(x + λa, ξⱼ + λbⱼ)` of the contact field with
    /// Hamiltonian `F = p(h) + ξ₁ξ₂ q(h) + ξ₁χ₁ + ξ₂χ₂`, where `λ² = 0`,
    /// `a = F − ½Σξⱼ DⱼF` and `bⱼ = ½ DⱼF`.
    Flow { lambda: Grassmann<S>, p: Vec<S>, q: Vec<S>, chi: [Grassmann<S>; 2] },
}

fn k2_step_germ<S: Scalar>(step: &K2Step<S>, m: u8, base: &S, order: i32, tol: f64) -> Result<MapGerm<S>> {
    let n = 2;
    let x = SuperJet::x(n, m, base.clone(), order);
    let h = SuperJet::h(n, m, base.clone(), order);
    let xi: Vec<SuperJet<S>> = (0..n).map(|i| SuperJet::xi(n, m, base.clone(), order, i)).collect::<Result<_>>()?;
    let poly = |c: &[S]| {
        let mut f = SuperJet::zero(n, m, base.clone(), order);
        let mut hp = SuperJet::one(n, m, base.clone(), order);
        for cj in c {
            f = &f + &hp.scale(cj);
            hp = &hp * &h;
        }
        f
    };
    match step {
        K2Step::Lift { shift, slope_root, higher, t } => {
            let mut coeffs = vec![base.add(shift), slope_root.mul(slope_root)];
            coeffs.extend(higher.iter().cloned());
            let g = poly(&coeffs);
            let root = g.dx().sqrt()?;
            let r = random::rotation(t);
            let phi = g.truncate(order - 1);
            let psi = (0..n)
                .map(|k| (&xi[0].scale(&r[k][0]) + &xi[1].scale(&r[k][1])).checked_mul(&root))
                .collect::<Result<_>>()?;
            MapGerm::new(phi, psi)?.certify(tol)
        }
        K2Step::Homography(mat) => mat.action_germ(base.clone(), order, tol),
        K2Step::Flow { lambda, p, q, chi } => {
            let mut f = &poly(p) + &(&xi[0] * &xi[1]).checked_mul(&poly(q))?;
            for j in 0..n {
                f = &f + &xi[j].right_mul(&chi[j]);
            }
            let half = S::from_ratio(1, 2);
            let mut a = f.truncate(order - 1);
            for j in 0..n {
                a = &a - &(&xi[j] * &f.d(j)?).scale(&half);
            }
            let phi = &x.truncate(order - 1) + &a.left_mul(lambda);
            let psi = (0..n)
                .map(|j| Ok(&xi[j].truncate(order - 1) + &f.d(j)?.scale(&half).left_mul(lambda)))
                .collect::<Result<_>>()?;
            MapGerm::new(phi, psi)?.certify(tol)
        }
    }
}

/// The germ at `base` of `W₁ ∘ W₂ ∘ … ∘ W_k` for the word `steps = [W₁, …, W_k]`;
/// each step is expanded at the body of the point it receives.
pub fn k2_sample<S: Scalar>(steps: &[K2Step<S>], m: u8, base: S, order: i32, tol: f64) -> Result<MapGerm<S>> {
    // Expanding at a point with even soul of nilpotency index ν costs ν − 1
    // orders on composition, and ν − 1 ≤ M/2.
    let step_order = order + m as i32 / 2;
    let mut acc = MapGerm::identity(2, m, base, order);
    for step in steps.iter().rev() {
        let at = acc.image_base().x.body();
        let g = k2_step_germ(step, m, &at, step_order, tol)?;
        acc = g.compose(&acc, tol)?.truncate(order);
    }
    acc.certify(tol)
}

/// A random N = 2 word of length 1..=`max_len`; retries draws whose
/// homographies send a point to infinity.
pub fn random_k2_word<S: Scalar>(rng: &mut SeededRng, m: u8, max_len: usize) -> Vec<K2Step<S>> {
    let len = rng.gen_range(1..=max_len.max(1));
    (0..len)
        .map(|_| match rng.gen_range(0..3) {
            0 => K2Step::Lift {
                shift: random::small_rational(rng, 2),
                slope_root: random::positive_rational(rng, 2),
                higher: (0..3).map(|_| random::small_rational(rng, 2)).collect(),
                t: random::small_rational(rng, 2),
            },
            1 => K2Step::Homography(
                ospgroup::random_word(rng, 2, m, 2).expect("generator words are well formed"),
            ),
            _ => {
                let lambda = if m >= 2 {
                    &random::odd_constant::<S>(rng, m) * &random::odd_constant::<S>(rng, m)
                } else {
                    Grassmann::zero(m)
                };
                K2Step::Flow {
                    lambda,
                    p: (0..4).map(|_| random::small_rational(rng, 2)).collect(),
                    q: (0..3).map(|_| random::small_rational(rng, 2)).collect(),
                    chi: [random::odd_constant(rng, m), random::odd_constant(rng, m)],
                }
            }
        })
        .collect()
}

/// A random certified K(2) germ at `base`.
pub fn random_k2<S: Scalar>(rng: &mut SeededRng, m: u8, base: S, order: i32, max_len: usize, tol: f64) -> Result<MapGerm<S>> {
    for _ in 0..64 {
        let word = random_k2_word(rng, m, max_len);
        match k2_sample(&word, m, base.clone(), order, tol) {
            Ok(g) => return Ok(g),
            Err(Error::Precondition(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Precondition("no admissible word found".into()))
}

/// A random PC(2|2) homography germ at `base` (a word in identity-component generators).
pub fn random_pc22<S: Scalar>(rng: &mut SeededRng, m: u8, base: S, order: i32, len: usize, tol: f64) -> Result<(OspMatrix<S>, MapGerm<S>)> {
    for _ in 0..64 {
        let mat = ospgroup::random_word(rng, 2, m, len)?;
        match mat.action_germ(base.clone(), order, tol) {
            Ok(g) => return Ok((mat, g)),
            Err(Error::Precondition(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Precondition("no admissible homography found".into()))
}
