//! Euclidean, affine and projective invariants of point tuples, in closed
//! form and through the normalizing group elements.

use crate::contactmap::SuperPoint;
use crate::error::{Error, Result};
use crate::grassmann::Grassmann;
use crate::ospgroup;
use crate::scalar::Scalar;

/// How the odd part of an invariant is determined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ambiguity {
    Exact,
    Sign,
    Orthogonal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantValue<S: Scalar> {
    pub even: Grassmann<S>,
    pub odd: Vec<Grassmann<S>>,
    pub ambiguity: Ambiguity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Euclid,
    Affine,
    Projective,
}

impl Kind {
    /// Number of points the invariant takes.
    pub fn arity(self) -> usize {
        match self {
            Kind::Euclid => 2,
            Kind::Affine => 3,
            Kind::Projective => 4,
        }
    }
}

fn check_pair<S: Scalar>(t1: &SuperPoint<S>, t2: &SuperPoint<S>) -> Result<()> {
    if t1.n() != t2.n() {
        return Err(Error::MismatchedN(t1.n(), t2.n()));
    }
    if t1.m() != t2.m() {
        return Err(Error::MismatchedGenerators(t1.m(), t2.m()));
    }
    Ok(())
}

/// `ξ·η = Σᵢ ξᵢηᵢ`.
pub fn dot<S: Scalar>(a: &[Grassmann<S>], b: &[Grassmann<S>]) -> Grassmann<S> {
    let m = a.first().or(b.first()).map_or(0, Grassmann::m);
    a.iter().zip(b).fold(Grassmann::zero(m), |acc, (x, y)| &acc + &(x * y))
}

/// The even bracket `[t₁, t₂] = x₂ − x₁ − ξ₂·ξ₁`.
pub fn bracket<S: Scalar>(t1: &SuperPoint<S>, t2: &SuperPoint<S>) -> Result<Grassmann<S>> {
    check_pair(t1, t2)?;
    Ok(&(&t2.x - &t1.x) - &dot(&t2.xi, &t1.xi))
}

/// The odd bracket `{t₁, t₂} = ξ₂ − ξ₁`.
pub fn odd_bracket<S: Scalar>(t1: &SuperPoint<S>, t2: &SuperPoint<S>) -> Result<Vec<Grassmann<S>>> {
    check_pair(t1, t2)?;
    Ok(t2.xi.iter().zip(&t1.xi).map(|(a, b)| a - b).collect())
}

fn scale_vec<S: Scalar>(v: &[Grassmann<S>], c: &Grassmann<S>) -> Vec<Grassmann<S>> {
    v.iter().map(|x| x * c).collect()
}

fn body_sign<S: Scalar>(g: &Grassmann<S>) -> i32 {
    let b = g.body();
    if b.is_zero() {
        0
    } else if b.is_positive() {
        1
    } else {
        -1
    }
}

pub fn euclid_invariant<S: Scalar>(t1: &SuperPoint<S>, t2: &SuperPoint<S>) -> Result<InvariantValue<S>> {
    Ok(InvariantValue { even: bracket(t1, t2)?, odd: odd_bracket(t1, t2)?, ambiguity: Ambiguity::Exact })
}

/// `[t₂,t₃] + [t₁,t₂] − {t₁,t₂}·{t₂,t₃} − [t₁,t₃]`, identically zero.
pub fn bracket_identity<S: Scalar>(t1: &SuperPoint<S>, t2: &SuperPoint<S>, t3: &SuperPoint<S>) -> Result<Grassmann<S>> {
    let lhs = &(&bracket(t2, t3)? + &bracket(t1, t2)?) - &dot(&odd_bracket(t1, t2)?, &odd_bracket(t2, t3)?);
    Ok(&lhs - &bracket(t1, t3)?)
}

/// `([t₁,t₃]/[t₁,t₂], {t₁,t₃}/[t₁,t₂]^{1/2})`, with `t₁, t₂` exchanged when `x₁ > x₂`.
pub fn affine_invariant<S: Scalar>(
    t1: &SuperPoint<S>,
    t2: &SuperPoint<S>,
    t3: &SuperPoint<S>,
) -> Result<InvariantValue<S>> {
    let (t1, t2) = ordered(t1, t2)?;
    let b12 = bracket(t1, t2)?;
    let even = bracket(t1, t3)?.div(&b12)?;
    let odd = scale_vec(&odd_bracket(t1, t3)?, &b12.sqrt()?.inv()?);
    Ok(InvariantValue { even, odd, ambiguity: Ambiguity::Exact })
}

fn ordered<'a, S: Scalar>(t1: &'a SuperPoint<S>, t2: &'a SuperPoint<S>) -> Result<(&'a SuperPoint<S>, &'a SuperPoint<S>)> {
    match body_sign(&(&t2.x - &t1.x)) {
        0 => Err(Error::Precondition("points have equal bodies".into())),
        1 => Ok((t1, t2)),
        _ => Ok((t2, t1)),
    }
}

/// `J(t₁, t₂) = {t₁,t₂}/[t₁,t₂]^{1/2}`, with the same ordering rule.
pub fn affine_j<S: Scalar>(t1: &SuperPoint<S>, t2: &SuperPoint<S>) -> Result<Vec<Grassmann<S>>> {
    let (t1, t2) = ordered(t1, t2)?;
    Ok(scale_vec(&odd_bracket(t1, t2)?, &bracket(t1, t2)?.sqrt()?.inv()?))
}

/// The super cross-ratio `[t₁,t₃][t₂,t₄]/([t₂,t₃][t₁,t₄])`.
pub fn cross_ratio<S: Scalar>(t: [&SuperPoint<S>; 4]) -> Result<Grassmann<S>> {
    let [t1, t2, t3, t4] = t;
    let num = &bracket(t1, t3)? * &bracket(t2, t4)?;
    let den = &bracket(t2, t3)? * &bracket(t1, t4)?;
    if den.body().is_zero() {
        return Err(Error::Precondition("coincident bodies in the cross-ratio".into()));
    }
    num.div(&den)
}

/// Orientation of three distinct reals on the oriented circle seen in an
/// affine chart: the sign of `(x₂−x₁)(x₃−x₂)(x₃−x₁)`.
pub fn ord_index<S: Scalar>(x1: &S, x2: &S, x3: &S) -> Result<i32> {
    let p = x2.sub(x1).mul(&x3.sub(x2)).mul(&x3.sub(x1));
    if p.is_zero() {
        Err(Error::Precondition("ord needs distinct points".into()))
    } else if p.is_positive() {
        Ok(1)
    } else {
        Ok(-1)
    }
}

pub fn ord<S: Scalar>(t1: &SuperPoint<S>, t2: &SuperPoint<S>, t3: &SuperPoint<S>) -> Result<i32> {
    ord_index(&t1.body(), &t2.body(), &t3.body())
}

fn oriented<'a, S: Scalar>(
    t1: &'a SuperPoint<S>,
    t2: &'a SuperPoint<S>,
    t3: &SuperPoint<S>,
) -> Result<(&'a SuperPoint<S>, &'a SuperPoint<S>)> {
    Ok(if ord(t1, t2, t3)? == 1 { (t1, t2) } else { (t2, t1) })
}

/// The odd projective invariant, up to sign (N = 1) or up to O(N).
///
/// Computed as `([t₁,t₂][t₁,t₃]/[t₂,t₃])^{1/2} ({t₂,t₄}[t₁,t₂] − {t₁,t₂}[t₂,t₄]) / ([t₁,t₂][t₁,t₄])`,
/// which equals `[t₁,t₂,t₃,t₄]^{1/2}({t₂,t₄}[t₁,t₂] − {t₁,t₂}[t₂,t₄])/([t₁,t₂][t₂,t₄][t₁,t₄])^{1/2}`
/// wherever the latter's radicands are positive, and stays defined for every `x₄`.
pub fn proj_odd_invariant<S: Scalar>(t: [&SuperPoint<S>; 4]) -> Result<InvariantValue<S>> {
    let [t1, t2, t3, t4] = t;
    let (t1, t2) = oriented(t1, t2, t3)?;
    let b12 = bracket(t1, t2)?;
    let b13 = bracket(t1, t3)?;
    let b23 = bracket(t2, t3)?;
    let b24 = bracket(t2, t4)?;
    let b14 = bracket(t1, t4)?;
    let pref = (&b12 * &b13).div(&b23)?.sqrt()?.div(&(&b12 * &b14))?;
    let o24 = odd_bracket(t2, t4)?;
    let o12 = odd_bracket(t1, t2)?;
    let odd = o24
        .iter()
        .zip(&o12)
        .map(|(u, v)| &(&(u * &b12) - &(v * &b24)) * &pref)
        .collect();
    let ambiguity = if t1.n() == 1 { Ambiguity::Sign } else { Ambiguity::Orthogonal };
    Ok(InvariantValue { even: cross_ratio([t1, t2, t3, t4])?, odd, ambiguity })
}

/// The literal square-root form of the odd projective invariant; needs positive radicands.
pub fn proj_odd_invariant_radical<S: Scalar>(t: [&SuperPoint<S>; 4]) -> Result<Vec<Grassmann<S>>> {
    let [t1, t2, t3, t4] = t;
    let (t1, t2) = oriented(t1, t2, t3)?;
    let b12 = bracket(t1, t2)?;
    let b24 = bracket(t2, t4)?;
    let b14 = bracket(t1, t4)?;
    let cr = cross_ratio([t1, t2, t3, t4])?.sqrt()?;
    let den = (&(&b12 * &b24) * &b14).sqrt()?.inv()?;
    let f = &cr * &den;
    Ok(odd_bracket(t2, t4)?
        .iter()
        .zip(&odd_bracket(t1, t2)?)
        .map(|(u, v)| &(&(u * &b12) - &(v * &b24)) * &f)
        .collect())
}

/// `J_p(t₁,t₂,t₃)` from Euclidean invariants, paired with the cyclic form
/// `(ξ₁[t₂,t₃] + ξ₂[t₃,t₁] + ξ₃[t₁,t₂] − ξ₁ξ₂ξ₃)/([t₁,t₃][t₃,t₂][t₂,t₁])^{1/2}` (N = 1).
pub fn proj_j<S: Scalar>(
    t1: &SuperPoint<S>,
    t2: &SuperPoint<S>,
    t3: &SuperPoint<S>,
) -> Result<(Grassmann<S>, Grassmann<S>)> {
    if t1.n() != 1 {
        return Err(Error::Precondition("J_p is implemented for N = 1".into()));
    }
    let (t1, t2) = oriented(t1, t2, t3)?;
    let b12 = bracket(t1, t2)?;
    let b23 = bracket(t2, t3)?;
    let b13 = bracket(t1, t3)?;
    let euclid = (&(&odd_bracket(t2, t3)?[0] * &b12) - &(&odd_bracket(t1, t2)?[0] * &b23))
        .div(&(&(&b12 * &b23) * &b13).sqrt()?)?;
    let (x1, x2, x3) = (&t1.xi[0], &t2.xi[0], &t3.xi[0]);
    let num = &(&(&(x1 * &b23) + &(x2 * &bracket(t3, t1)?)) + &(x3 * &b12)) - &(&(x1 * x2) * x3);
    let den = (&(&b13 * &bracket(t3, t2)?) * &bracket(t2, t1)?).sqrt()?;
    Ok((euclid, num.div(&den)?))
}

/// Invariant computed by normalizing the first points with the unique (or
/// two-valued) group element and evaluating it at the last point.
pub fn constructive_invariant<S: Scalar>(kind: Kind, points: &[SuperPoint<S>]) -> Result<InvariantValue<S>> {
    if points.len() != kind.arity() {
        return Err(Error::Precondition(format!("{kind:?} invariant takes {} points", kind.arity())));
    }
    let (k, last, ambiguity) = match kind {
        Kind::Euclid => (ospgroup::euclid_normalize(&points[0])?, &points[1], Ambiguity::Exact),
        Kind::Affine => {
            let (t1, t2) = ordered(&points[0], &points[1])?;
            (ospgroup::affine_normalize(t1, t2)?, &points[2], Ambiguity::Exact)
        }
        Kind::Projective => {
            let amb = if points[0].n() == 1 { Ambiguity::Sign } else { Ambiguity::Orthogonal };
            (ospgroup::proj_normalize(&points[0], &points[1], &points[2])?.0, &points[3], amb)
        }
    };
    let image = k.act(last)?;
    Ok(InvariantValue { even: image.x, odd: image.xi, ambiguity })
}

/// The closed-form counterpart of [`constructive_invariant`].
pub fn closed_form_invariant<S: Scalar>(kind: Kind, points: &[SuperPoint<S>]) -> Result<InvariantValue<S>> {
    if points.len() != kind.arity() {
        return Err(Error::Precondition(format!("{kind:?} invariant takes {} points", kind.arity())));
    }
    match kind {
        Kind::Euclid => euclid_invariant(&points[0], &points[1]),
        Kind::Affine => affine_invariant(&points[0], &points[1], &points[2]),
        Kind::Projective => proj_odd_invariant([&points[0], &points[1], &points[2], &points[3]]),
    }
}

fn max_diff<S: Scalar>(a: &[Grassmann<S>], b: &[Grassmann<S>], sign: &S) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - &y.scale(sign)).max_abs()).fold(0.0, f64::max)
}

/// Largest discrepancy between two odd parts, minimized over the declared
/// ambiguity. For the O(N) case the comparison uses the sign ambiguity,
/// which is the only freedom the normalizers here produce, and additionally
/// reports the O(N)-invariant `u₁u₂…` products.
pub fn odd_discrepancy<S: Scalar>(a: &InvariantValue<S>, b: &InvariantValue<S>) -> f64 {
    let plus = max_diff(&a.odd, &b.odd, &S::one());
    match a.ambiguity {
        Ambiguity::Exact => plus,
        Ambiguity::Sign | Ambiguity::Orthogonal => plus.min(max_diff(&a.odd, &b.odd, &S::from_i64(-1))),
    }
}
