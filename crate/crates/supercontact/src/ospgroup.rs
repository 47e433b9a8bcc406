//! The orthosymplectic supergroup SpO(2|N) as block matrices
//!
//! ```text
//! [ a  b  γ ]
//! [ c  d  δ ]
//! [ α  β  e ]
//! ```
//!
//! acting on the supercircle by
//! `(x, ξ) ↦ ((ax + b + γ·ξ)/(cx + d + δ·ξ), (αx + β + eξ)/(cx + d + δ·ξ))`.

use rand::Rng;

use crate::contactmap::{MapGerm, SuperPoint};
use crate::error::{Error, Result};
use crate::grassmann::Grassmann;
use crate::random::{self, SeededRng};
use crate::scalar::Scalar;
use crate::superjet::SuperJet;

#[derive(Clone, PartialEq, Debug)]
pub struct OspMatrix<S: Scalar> {
    n: usize,
    m: u8,
    rows: Vec<Vec<Grassmann<S>>>,
}

/// Defining-relation residuals of an [`OspMatrix`]: `ad − bc − αᵗβ − 1`,
/// `(eᵗe)_{jk} + γⱼδₖ + γₖδⱼ − δ_{jk}` (the symmetric form of `eᵗe + 2γᵗδ − 1`),
/// `αᵗe − aδ + cγ` and `βᵗe − bδ + dγ`.
#[derive(Clone, Debug)]
pub struct Residuals<S: Scalar> {
    pub det: Grassmann<S>,
    pub orth: Vec<Vec<Grassmann<S>>>,
    pub alpha: Vec<Grassmann<S>>,
    pub beta: Vec<Grassmann<S>>,
}

impl<S: Scalar> Residuals<S> {
    fn all(&self) -> impl Iterator<Item = &Grassmann<S>> {
        std::iter::once(&self.det)
            .chain(self.orth.iter().flatten())
            .chain(self.alpha.iter())
            .chain(self.beta.iter())
    }

    pub fn is_zero(&self) -> bool {
        self.all().all(Grassmann::is_zero)
    }

    pub fn max_abs(&self) -> f64 {
        self.all().map(Grassmann::max_abs).fold(0.0, f64::max)
    }
}

/// Relative tolerance for the floating round-trip check in [`OspMatrix::factorize`].
const FLOAT_TOL: f64 = 1e-9;

/// Parameters of the generic factorization `L(c̃, δ̃) · diag(ã, ã⁻¹, 1) · T(ε, b̃, β̃)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization<S: Scalar> {
    pub a: Grassmann<S>,
    pub b: Grassmann<S>,
    pub c: Grassmann<S>,
    pub beta: Grassmann<S>,
    pub delta: Grassmann<S>,
    pub eps: i64,
}

impl<S: Scalar> OspMatrix<S> {
    pub fn identity(n: usize, m: u8) -> Self {
        let size = n + 2;
        let rows = (0..size)
            .map(|i| (0..size).map(|j| if i == j { Grassmann::one(m) } else { Grassmann::zero(m) }).collect())
            .collect();
        OspMatrix { n, m, rows }
    }

    /// Builds a matrix from its blocks; `alpha`, `beta` are columns and
    /// `gamma`, `delta` rows of length N.
    #[allow(clippy::too_many_arguments)]
    pub fn from_blocks(
        a: Grassmann<S>,
        b: Grassmann<S>,
        c: Grassmann<S>,
        d: Grassmann<S>,
        alpha: Vec<Grassmann<S>>,
        beta: Vec<Grassmann<S>>,
        gamma: Vec<Grassmann<S>>,
        delta: Vec<Grassmann<S>>,
        e: Vec<Vec<Grassmann<S>>>,
    ) -> Result<Self> {
        let n = alpha.len();
        let m = a.m();
        if beta.len() != n || gamma.len() != n || delta.len() != n || e.len() != n || e.iter().any(|r| r.len() != n) {
            return Err(Error::Precondition("inconsistent block sizes".into()));
        }
        let all = [&a, &b, &c, &d]
            .into_iter()
            .chain(alpha.iter())
            .chain(beta.iter())
            .chain(gamma.iter())
            .chain(delta.iter())
            .chain(e.iter().flatten());
        for g in all {
            if g.m() != m {
                return Err(Error::MismatchedGenerators(m, g.m()));
            }
        }
        for g in [&a, &b, &c, &d].into_iter().chain(e.iter().flatten()) {
            if !g.is_even() {
                return Err(Error::NotEven("even block"));
            }
        }
        for g in alpha.iter().chain(&beta).chain(&gamma).chain(&delta) {
            if !g.is_odd() {
                return Err(Error::NotOdd("odd block"));
            }
        }
        let mut rows = vec![Vec::with_capacity(n + 2); n + 2];
        rows[0].extend([a, b]);
        rows[0].extend(gamma);
        rows[1].extend([c, d]);
        rows[1].extend(delta);
        for k in 0..n {
            rows[k + 2].push(alpha[k].clone());
            rows[k + 2].push(beta[k].clone());
            rows[k + 2].extend(e[k].iter().cloned());
        }
        Ok(OspMatrix { n, m, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> u8 {
        self.m
    }
    pub fn entry(&self, i: usize, j: usize) -> &Grassmann<S> {
        &self.rows[i][j]
    }
    pub fn rows(&self) -> &[Vec<Grassmann<S>>] {
        &self.rows
    }
    pub fn a(&self) -> &Grassmann<S> {
        &self.rows[0][0]
    }
    pub fn b(&self) -> &Grassmann<S> {
        &self.rows[0][1]
    }
    pub fn c(&self) -> &Grassmann<S> {
        &self.rows[1][0]
    }
    pub fn d(&self) -> &Grassmann<S> {
        &self.rows[1][1]
    }
    pub fn alpha(&self, k: usize) -> &Grassmann<S> {
        &self.rows[k + 2][0]
    }
    pub fn beta(&self, k: usize) -> &Grassmann<S> {
        &self.rows[k + 2][1]
    }
    pub fn gamma(&self, k: usize) -> &Grassmann<S> {
        &self.rows[0][k + 2]
    }
    pub fn delta(&self, k: usize) -> &Grassmann<S> {
        &self.rows[1][k + 2]
    }
    pub fn e(&self, i: usize, j: usize) -> &Grassmann<S> {
        &self.rows[i + 2][j + 2]
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::MismatchedN(self.n, other.n));
        }
        if self.m != other.m {
            return Err(Error::MismatchedGenerators(self.m, other.m));
        }
        let size = self.n + 2;
        let rows = (0..size)
            .map(|i| {
                (0..size)
                    .map(|k| {
                        (0..size).fold(Grassmann::zero(self.m), |acc, j| &acc + &(&self.rows[i][j] * &other.rows[j][k]))
                    })
                    .collect()
            })
            .collect();
        Ok(OspMatrix { n: self.n, m: self.m, rows })
    }

    pub fn scale(&self, s: &S) -> Self {
        OspMatrix {
            n: self.n,
            m: self.m,
            rows: self.rows.iter().map(|r| r.iter().map(|g| g.scale(s)).collect()).collect(),
        }
    }

    pub fn validate(&self) -> Residuals<S> {
        let n = self.n;
        let mut det = &(self.a() * self.d()) - &(self.b() * self.c());
        for k in 0..n {
            det = &det - &(self.alpha(k) * self.beta(k));
        }
        det = &det - &Grassmann::one(self.m);
        let orth = (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| {
                        let mut s = (0..n).fold(Grassmann::zero(self.m), |acc, i| &acc + &(self.e(i, j) * self.e(i, k)));
                        s = &(&s + &(self.gamma(j) * self.delta(k))) + &(self.gamma(k) * self.delta(j));
                        if j == k {
                            s = &s - &Grassmann::one(self.m);
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        let col = |v: &dyn Fn(usize) -> Grassmann<S>, k: usize| {
            (0..n).fold(Grassmann::zero(self.m), |acc, i| &acc + &(&v(i) * self.e(i, k)))
        };
        let alpha = (0..n)
            .map(|k| {
                &(&col(&|i| self.alpha(i).clone(), k) - &(self.a() * self.delta(k))) + &(self.c() * self.gamma(k))
            })
            .collect();
        let beta = (0..n)
            .map(|k| &(&col(&|i| self.beta(i).clone(), k) - &(self.b() * self.delta(k))) + &(self.d() * self.gamma(k)))
            .collect();
        Residuals { det, orth, alpha, beta }
    }

    /// Berezinian `e + αβe⁻¹` (N = 1 only).
    pub fn berezinian(&self) -> Result<Grassmann<S>> {
        if self.n != 1 {
            return Err(Error::Precondition("the Berezinian is implemented for N = 1".into()));
        }
        let e = self.e(0, 0);
        Ok(e + &(&(self.alpha(0) * self.beta(0)) * &e.inv()?))
    }

    fn denominator(&self, x: &Grassmann<S>, xi: &[Grassmann<S>]) -> Grassmann<S> {
        let mut den = &(self.c() * x) + self.d();
        for (j, xj) in xi.iter().enumerate() {
            den = &den + &(self.delta(j) * xj);
        }
        den
    }

    fn check_point(&self, p: &SuperPoint<S>) -> Result<()> {
        if p.n() != self.n {
            return Err(Error::MismatchedN(self.n, p.n()));
        }
        if p.m() != self.m {
            return Err(Error::MismatchedGenerators(self.m, p.m()));
        }
        Ok(())
    }

    /// Body of the homogeneous denominator at `p`; zero means `p ↦ ∞`.
    pub fn denominator_at(&self, p: &SuperPoint<S>) -> Result<Grassmann<S>> {
        self.check_point(p)?;
        Ok(self.denominator(&p.x, &p.xi))
    }

    /// The homographic action on a point.
    pub fn act(&self, p: &SuperPoint<S>) -> Result<SuperPoint<S>> {
        self.check_point(p)?;
        let inv = self.denominator(&p.x, &p.xi).inv()?;
        let mut num = &(self.a() * &p.x) + self.b();
        for (j, xj) in p.xi.iter().enumerate() {
            num = &num + &(self.gamma(j) * xj);
        }
        let xi = (0..self.n)
            .map(|k| {
                let mut v = &(self.alpha(k) * &p.x) + self.beta(k);
                for (j, xj) in p.xi.iter().enumerate() {
                    v = &v + &(self.e(k, j) * xj);
                }
                &v * &inv
            })
            .collect();
        Ok(SuperPoint { x: &num * &inv, xi })
    }

    /// The germ of the action at a soul-free base point, contact-certified.
    pub fn action_germ(&self, base: S, order: i32, tol: f64) -> Result<MapGerm<S>> {
        let n = self.n;
        let m = self.m;
        let x = SuperJet::x(n, m, base.clone(), order);
        let xis: Vec<_> = (0..n).map(|i| SuperJet::xi(n, m, base.clone(), order, i)).collect::<Result<_>>()?;
        let mut den = x.right_mul(self.c()).add_constant(self.d());
        for (j, xj) in xis.iter().enumerate() {
            den = &den + &xj.left_mul(self.delta(j));
        }
        if den.coeff(0, 0).body().abs_f64() <= if S::EXACT { 0.0 } else { tol } {
            return Err(Error::Precondition(format!("base {} is mapped to infinity", base.to_literal())));
        }
        let inv = den.inv()?;
        let mut num = x.right_mul(self.a()).add_constant(self.b());
        for (j, xj) in xis.iter().enumerate() {
            num = &num + &xj.left_mul(self.gamma(j));
        }
        let psi = (0..n)
            .map(|k| {
                let mut v = x.right_mul(self.alpha(k)).add_constant(self.beta(k));
                for (j, xj) in xis.iter().enumerate() {
                    v = &v + &xj.right_mul(self.e(k, j));
                }
                &v * &inv
            })
            .collect();
        MapGerm::new(&num * &inv, psi)?.certify(tol)
    }

    /// Generic factorization for N = 1.
    pub fn factorize(&self) -> Result<Factorization<S>> {
        if self.n != 1 {
            return Err(Error::Precondition("factorization is implemented for N = 1".into()));
        }
        let body = self.a().body();
        if body.is_zero() {
            return Err(Error::NonGeneric("a has zero body".into()));
        }
        let eps = if body.is_positive() { 1 } else { -1 };
        let a_t = self.a().scale(&S::from_i64(eps));
        let a_inv = a_t.inv()?;
        let f = Factorization {
            b: self.b() * &a_inv,
            beta: -(self.gamma(0) * &a_inv),
            c: self.c() * &self.a().inv()?,
            delta: self.alpha(0) * &self.a().inv()?,
            a: a_t,
            eps,
        };
        let prod = f.product(self.m)?;
        let same = if S::EXACT {
            prod == *self
        } else {
            let d = prod.rows.iter().flatten().zip(self.rows.iter().flatten()).map(|(x, y)| (x - y).max_abs());
            d.fold(0.0, f64::max) <= FLOAT_TOL * self.rows.iter().flatten().map(Grassmann::max_abs).fold(1.0, f64::max)
        };
        if !same {
            return Err(Error::NonGeneric("factor word does not reproduce the matrix".into()));
        }
        Ok(f)
    }
}

impl<S: Scalar> Factorization<S> {
    pub fn product(&self, m: u8) -> Result<OspMatrix<S>> {
        let l = lower(&self.c, &[self.delta.clone()])?;
        let dg = dilatation(1, m, &self.a)?;
        let t = signed_translation(self.eps, &self.b, &self.beta)?;
        l.checked_mul(&dg)?.checked_mul(&t)
    }
}

fn zero_vec<S: Scalar>(n: usize, m: u8) -> Vec<Grassmann<S>> {
    vec![Grassmann::zero(m); n]
}

fn unit<S: Scalar>(n: usize, m: u8) -> Vec<Vec<Grassmann<S>>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { Grassmann::one(m) } else { Grassmann::zero(m) }).collect()).collect()
}

/// `[[1,0,0],[c,1,δᵗ],[δ,0,I]]`.
pub fn lower<S: Scalar>(c: &Grassmann<S>, delta: &[Grassmann<S>]) -> Result<OspMatrix<S>> {
    let (n, m) = (delta.len(), c.m());
    OspMatrix::from_blocks(
        Grassmann::one(m),
        Grassmann::zero(m),
        c.clone(),
        Grassmann::one(m),
        delta.to_vec(),
        zero_vec(n, m),
        zero_vec(n, m),
        delta.to_vec(),
        unit(n, m),
    )
}

/// `diag(a, a⁻¹, I)`, acting as `(x, ξ) ↦ (a²x, aξ)`.
pub fn dilatation<S: Scalar>(n: usize, m: u8, a: &Grassmann<S>) -> Result<OspMatrix<S>> {
    OspMatrix::from_blocks(
        a.clone(),
        Grassmann::zero(m),
        Grassmann::zero(m),
        a.inv()?,
        zero_vec(n, m),
        zero_vec(n, m),
        zero_vec(n, m),
        zero_vec(n, m),
        unit(n, m),
    )
}

/// `[[ε, b, −β],[0, ε, 0],[0, εβ, 1]]` for N = 1.
pub fn signed_translation<S: Scalar>(eps: i64, b: &Grassmann<S>, beta: &Grassmann<S>) -> Result<OspMatrix<S>> {
    let m = b.m();
    let e = Grassmann::from_i64(m, eps);
    OspMatrix::from_blocks(
        e.clone(),
        b.clone(),
        Grassmann::zero(m),
        e.clone(),
        vec![Grassmann::zero(m)],
        vec![beta * &e],
        vec![-beta],
        vec![Grassmann::zero(m)],
        vec![vec![Grassmann::one(m)]],
    )
}

/// `[[a, ab, −aβᵗ],[0, a⁻¹, 0],[0, β, I]]`, acting as `(x, ξ) ↦ (a²(x + b − β·ξ), a(β + ξ))`.
pub fn affine<S: Scalar>(a: &Grassmann<S>, b: &Grassmann<S>, beta: &[Grassmann<S>]) -> Result<OspMatrix<S>> {
    let (n, m) = (beta.len(), a.m());
    OspMatrix::from_blocks(
        a.clone(),
        a * b,
        Grassmann::zero(m),
        a.inv()?,
        zero_vec(n, m),
        beta.to_vec(),
        beta.iter().map(|x| -(a * x)).collect(),
        zero_vec(n, m),
        unit(n, m),
    )
}

/// The translation `(x, ξ) ↦ (x + b − β·ξ, β + ξ)`.
pub fn translation<S: Scalar>(b: &Grassmann<S>, beta: &[Grassmann<S>]) -> Result<OspMatrix<S>> {
    affine(&Grassmann::one(b.m()), b, beta)
}

/// `diag(1, 1, R)` for an orthogonal scalar matrix `R`.
pub fn rotation<S: Scalar>(m: u8, r: &[Vec<S>]) -> Result<OspMatrix<S>> {
    let n = r.len();
    OspMatrix::from_blocks(
        Grassmann::one(m),
        Grassmann::zero(m),
        Grassmann::zero(m),
        Grassmann::one(m),
        zero_vec(n, m),
        zero_vec(n, m),
        zero_vec(n, m),
        zero_vec(n, m),
        r.iter().map(|row| row.iter().map(|s| Grassmann::scalar(m, s.clone())).collect()).collect(),
    )
}

/// `(x, ξ) ↦ (−1/x, ξ/x)`.
pub fn inversion<S: Scalar>(n: usize, m: u8) -> Result<OspMatrix<S>> {
    OspMatrix::from_blocks(
        Grassmann::zero(m),
        Grassmann::from_i64(m, -1),
        Grassmann::one(m),
        Grassmann::zero(m),
        zero_vec(n, m),
        zero_vec(n, m),
        zero_vec(n, m),
        zero_vec(n, m),
        unit(n, m),
    )
}

/// `ι : (x, ξ) ↦ (x, −ξ)`.
pub fn odd_reflection<S: Scalar>(n: usize, m: u8) -> Result<OspMatrix<S>> {
    let minus: Vec<Vec<S>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { S::from_i64(-1) } else { S::zero() }).collect()).collect();
    rotation(m, &minus)
}

/// A random SpO₊(2|1) element `L · diag(ã, ã⁻¹, 1) · T(1, b̃, β̃)` with generic odd parameters.
pub fn random_spo21<S: Scalar>(rng: &mut SeededRng, m: u8) -> Result<OspMatrix<S>> {
    let f = Factorization {
        a: Grassmann::scalar(m, random::positive_rational::<S>(rng, 3)),
        b: Grassmann::scalar(m, random::small_rational::<S>(rng, 3)),
        c: Grassmann::scalar(m, random::small_rational::<S>(rng, 3)),
        beta: random::odd_constant(rng, m),
        delta: random::odd_constant(rng, m),
        eps: 1,
    };
    f.product(m)
}

/// A random word of `len` identity-component generators: translations,
/// dilatations, rotations, lower-triangular elements and inversions.
pub fn random_word<S: Scalar>(rng: &mut SeededRng, n: usize, m: u8, len: usize) -> Result<OspMatrix<S>> {
    let mut acc = OspMatrix::identity(n, m);
    for _ in 0..len {
        let odd = |rng: &mut SeededRng| (0..n).map(|_| random::odd_constant::<S>(rng, m)).collect::<Vec<_>>();
        let g = match rng.gen_range(0..5) {
            0 => translation(&Grassmann::scalar(m, random::small_rational(rng, 3)), &odd(rng))?,
            1 => dilatation(n, m, &Grassmann::scalar(m, random::positive_rational(rng, 3)))?,
            2 if n >= 2 => {
                let r = random::rotation(&random::small_rational::<S>(rng, 2));
                let mut rm: Vec<Vec<S>> = unit::<S>(n, 0).iter().map(|row| row.iter().map(|g| g.body()).collect()).collect();
                for i in 0..2 {
                    for j in 0..2 {
                        rm[i][j] = r[i][j].clone();
                    }
                }
                rotation(m, &rm)?
            }
            3 => inversion(n, m)?,
            _ => lower(&Grassmann::scalar(m, random::small_rational(rng, 3)), &odd(rng))?,
        };
        acc = acc.checked_mul(&g)?;
    }
    Ok(acc)
}

/// The unique translation sending `t₁` to the origin.
pub fn euclid_normalize<S: Scalar>(t1: &SuperPoint<S>) -> Result<OspMatrix<S>> {
    let beta: Vec<_> = t1.xi.iter().map(|x| -x).collect();
    translation(&-&t1.x, &beta)
}

/// The unique affine element with `t₁ ↦ 0` and `p₀(t₂) ↦ 1`; needs `x₁ < x₂`.
pub fn affine_normalize<S: Scalar>(t1: &SuperPoint<S>, t2: &SuperPoint<S>) -> Result<OspMatrix<S>> {
    let br = crate::invariants::bracket(t1, t2)?;
    if !br.body().is_positive() {
        return Err(Error::Precondition("affine normalization needs x₁ < x₂".into()));
    }
    let a = br.inv()?.sqrt()?;
    let n = t1.n();
    dilatation(n, t1.m(), &a)?.checked_mul(&euclid_normalize(t1)?)
}

/// The two projective normalizers `(k₊, k₋ = ι∘k₊)` with `t₁ ↦ ∞`,
/// `t₂ ↦ 0` and `p₀(t₃) ↦ 1`; needs `x₁ < x₂ < x₃`.
pub fn proj_normalize<S: Scalar>(
    t1: &SuperPoint<S>,
    t2: &SuperPoint<S>,
    t3: &SuperPoint<S>,
) -> Result<(OspMatrix<S>, OspMatrix<S>)> {
    use crate::invariants::{bracket, odd_bracket};
    let (x1, x2, x3) = (t1.x.body(), t2.x.body(), t3.x.body());
    if !(x2.sub(&x1).is_positive() && x3.sub(&x2).is_positive()) {
        return Err(Error::Precondition("projective normalization needs x₁ < x₂ < x₃".into()));
    }
    let (n, m) = (t1.n(), t1.m());
    let g = affine_normalize(t2, t3)?;
    let b12 = bracket(t1, t2)?;
    let b13 = bracket(t1, t3)?;
    let b23 = bracket(t2, t3)?;
    let o12 = odd_bracket(t1, t2)?;
    let a = b13.div(&b12)?.sqrt()?;
    let ac = b23.div(&b12)?;
    let ainv = a.inv()?;
    let c = &ac * &ainv;
    let factor = &b23.sqrt()?.inv()? * &ac;
    let alpha: Vec<_> = o12.iter().map(|o| -(o * &factor)).collect();
    let delta: Vec<_> = alpha.iter().map(|x| x * &ainv).collect();
    let h = OspMatrix::from_blocks(
        a,
        Grassmann::zero(m),
        c,
        ainv,
        alpha,
        zero_vec(n, m),
        zero_vec(n, m),
        delta,
        unit(n, m),
    )?;
    let kp = h.checked_mul(&g)?;
    let km = odd_reflection(n, m)?.checked_mul(&kp)?;
    Ok((kp, km))
}
