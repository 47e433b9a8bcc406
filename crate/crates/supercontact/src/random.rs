//! Seeded random parameters with small rational values.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::grassmann::Grassmann;
use crate::scalar::Scalar;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for one trial of a suite.
pub fn trial_rng(seed: u64, trial: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(trial + 1);
    r
}

/// A uniformly drawn p/q with |p/q| ≤ bound and q ≤ 3.
pub fn small_rational<S: Scalar>(rng: &mut SeededRng, bound: i64) -> S {
    let q = rng.gen_range(1..=3);
    let p = rng.gen_range(-bound * q..=bound * q);
    S::from_ratio(p, q)
}

pub fn nonzero_rational<S: Scalar>(rng: &mut SeededRng, bound: i64) -> S {
    loop {
        let s: S = small_rational(rng, bound);
        if !s.is_zero() {
            return s;
        }
    }
}

pub fn positive_rational<S: Scalar>(rng: &mut SeededRng, bound: i64) -> S {
    let q = rng.gen_range(1..=3);
    let p = rng.gen_range(1..=bound * q);
    S::from_ratio(p, q)
}

/// A random linear combination of all generators: a generic odd constant.
pub fn odd_constant<S: Scalar>(rng: &mut SeededRng, m: u8) -> Grassmann<S> {
    let terms: Vec<_> = (0..m).map(|i| (1u32 << i, small_rational::<S>(rng, 2))).collect();
    Grassmann::from_terms(m, terms).expect("generator masks in range")
}

/// A random even element with the given body and quadratic soul.
pub fn even_constant<S: Scalar>(rng: &mut SeededRng, m: u8, body: S) -> Grassmann<S> {
    let mut terms = vec![(0u32, body)];
    for i in 0..m {
        for j in i + 1..m {
            if rng.gen_bool(0.5) {
                terms.push(((1 << i) | (1 << j), small_rational::<S>(rng, 2)));
            }
        }
    }
    Grassmann::from_terms(m, terms).expect("generator masks in range")
}

/// A Pythagorean rotation ((1−t²)/(1+t²), 2t/(1+t²)) for rational t.
pub fn rotation<S: Scalar>(t: &S) -> [[S; 2]; 2] {
    let t2 = t.mul(t);
    let den = S::one().add(&t2).inv().expect("1 + t² > 0");
    let c = S::one().sub(&t2).mul(&den);
    let s = S::from_i64(2).mul(t).mul(&den);
    [[c.clone(), s.neg()], [s, c]]
}
