use supercontact::cartan::{self, EpsComparison};
use supercontact::cocycles::{self, Cocycle};
use supercontact::contactmap::{random_k2, random_pc22, SuperPoint};
use supercontact::grassmann::Grassmann;
use supercontact::random;
use supercontact::scalar::{Rational, Scalar};
use supercontact::superjet::SuperJet;

type Q = Rational;

const M: u8 = 4;
const ORDER: i32 = 6;

fn q(n: i64) -> Q {
    Q::from_i64(n)
}

fn point(rng: &mut random::SeededRng, base: &Q) -> SuperPoint<Q> {
    SuperPoint::new(
        Grassmann::scalar(M, base.clone()),
        vec![random::odd_constant(rng, M), random::odd_constant(rng, M)],
    )
    .unwrap()
}

#[test]
fn relations_hold_on_random_k2() {
    for trial in 0..6 {
        let mut rng = random::trial_rng(11, trial);
        let g = random_k2::<Q>(&mut rng, M, q(0), ORDER, 3, 0.0).unwrap();
        let r = cocycles::s2_relations(&g, 0.0).unwrap();
        for (k, res) in r.iter().enumerate() {
            assert!(res.is_zero(), "trial {trial} relation {k}: {res:?}");
        }
    }
}

#[test]
fn schwarzian_vanishes_on_homographies() {
    for trial in 0..6 {
        let mut rng = random::trial_rng(12, trial);
        let (_, g) = random_pc22::<Q>(&mut rng, M, q(0), ORDER, 3, 0.0).unwrap();
        assert!(cocycles::schwarzian_s2(&g, 0.0).unwrap().coeff.is_zero(), "trial {trial}");
        assert!(cocycles::quad_s2(&g, 0.0).unwrap().is_zero(), "trial {trial}");
    }
}

#[test]
fn schwarzian_nonzero_on_generic_germ() {
    let mut rng = random::trial_rng(13, 0);
    let mut seen = false;
    for _ in 0..5 {
        let g = random_k2::<Q>(&mut rng, M, q(0), ORDER, 3, 0.0).unwrap();
        seen |= !cocycles::schwarzian_s2(&g, 0.0).unwrap().coeff.is_zero();
    }
    assert!(seen);
}

#[test]
fn laws_on_chained_k2_pairs() {
    for trial in 0..4 {
        let mut rng = random::trial_rng(14, trial);
        let psi = random_k2::<Q>(&mut rng, M, q(0), ORDER, 2, 0.0).unwrap();
        let at = psi.image_base().x.body();
        let phi = random_k2::<Q>(&mut rng, M, at, ORDER, 2, 0.0).unwrap();
        for c in [Cocycle::Euclid, Cocycle::Affine, Cocycle::Schwarzian, Cocycle::SchwarzianQuad] {
            let r = cocycles::law_residual(c, &phi, &psi, 0.0).unwrap();
            assert!(r.iter().all(SuperJet::is_zero), "trial {trial} {c:?}");
        }
    }
}

fn check(c: &EpsComparison<Q>, what: &str) {
    assert!(c.is_exact(), "{what}: {:?}", c.residuals());
}

#[test]
fn cartan_expansions_n2() {
    for trial in 0..4 {
        let mut rng = random::trial_rng(15, trial);
        let g = random_k2::<Q>(&mut rng, M, q(0), ORDER, 3, 0.0).unwrap();
        let x = cartan::random_field(&mut rng, 2, M, q(0), ORDER).unwrap();
        let t1 = point(&mut rng, &q(0));
        check(&cartan::cartan_projective(&g, &x, &t1, 0.0).unwrap(), "projective");
        check(&cartan::cartan_euclid(&g, &x, &t1, 0.0).unwrap(), "euclid");
        check(&cartan::cartan_affine(&g, &x, &t1, 0.0).unwrap(), "affine");
    }
}

#[test]
fn cartan_expansions_n0() {
    for trial in 0..4 {
        let mut rng = random::trial_rng(16, trial);
        let f = cartan::random_jet::<Q>(&mut rng, 0, M, q(0), ORDER, 4, false).unwrap();
        let mut f = f;
        let c1 = f.coeff(0, 1).soul().checked_add(&Grassmann::scalar(M, q(1))).unwrap();
        f.set(0, 1, c1);
        let g = supercontact::contactmap::MapGerm::new(f, vec![]).unwrap().certify(0.0).unwrap();
        let x = cartan::random_field(&mut rng, 0, M, q(0), ORDER).unwrap();
        let t1 = SuperPoint::new(Grassmann::zero(M), vec![]).unwrap();
        check(&cartan::cartan_projective(&g, &x, &t1, 0.0).unwrap(), "projective");
    }
}
