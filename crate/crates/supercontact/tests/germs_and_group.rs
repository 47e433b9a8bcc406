use supercontact::contactmap::{self, K2Step, MapGerm, SuperPoint};
use supercontact::invariants::{self, Kind};
use supercontact::ospgroup::{self, OspMatrix};
use supercontact::random;
use supercontact::{Grassmann, Rational, Scalar, SuperJet};

type Q = Rational;
type G = Grassmann<Q>;
type J = SuperJet<Q>;

fn q(n: i64, d: i64) -> Q {
    Q::from_ratio(n, d)
}

fn th(m: u8, i: usize) -> G {
    G::generator(m, i).unwrap()
}

#[test]
fn contact_residual_examples() {
    let m = 2;
    let id = MapGerm::<Q>::identity(1, m, q(0, 1), 5);
    assert!(id.contact_residuals().unwrap().iter().all(J::is_zero));
    let tr = contactmap::translation(q(1, 1), 5, &G::from_i64(m, 3), &[th(m, 0)]).unwrap();
    assert!(tr.contact_residuals().unwrap().iter().all(J::is_zero));
    let bad = MapGerm::new(J::x(1, 0, q(0, 1), 4), vec![J::xi(1, 0, q(0, 1), 4, 0).unwrap().scale(&q(2, 1))]).unwrap();
    let r = &bad.contact_residuals().unwrap()[0];
    assert_eq!(*r, J::xi(1, 0, q(0, 1), 3, 0).unwrap().scale(&q(-3, 1)));
    assert!(bad.certify(0.0).is_err());
}

#[test]
fn multiplier_examples() {
    let m = 2;
    let tr = contactmap::translation(q(1, 1), 5, &G::from_i64(m, 3), &[th(m, 0)]).unwrap();
    assert_eq!(tr.multiplier(0.0).unwrap(), J::one(1, m, q(1, 1), 4));
    let dil = contactmap::dilatation(1, m, q(1, 1), 5, &q(3, 1)).unwrap();
    assert_eq!(dil.multiplier(0.0).unwrap(), J::scalar(1, m, q(1, 1), 4, q(9, 1)));
    let h = ospgroup::random_spo21::<Q>(&mut random::rng(3), m).unwrap();
    let germ = h.action_germ(q(1, 2), 5, 0.0).unwrap();
    let x = J::x(1, m, q(1, 2), 5);
    let xi = J::xi(1, m, q(1, 2), 5, 0).unwrap();
    let den = &x.right_mul(h.c()).add_constant(h.d()) + &xi.left_mul(h.delta(0));
    let expect = den.pow(2).inv().unwrap().truncate(4);
    assert_eq!(germ.multiplier(0.0).unwrap(), expect);
}

#[test]
fn contact_from_psi_examples() {
    let m = 2;
    let base = q(0, 1);
    let one = J::one(0, m, base.clone(), 5);
    let zero = J::zero(0, m, base.clone(), 5);
    let id = contactmap::contact_from_psi(&one, &zero, &G::zero(m)).unwrap();
    assert_eq!(id.phi(), MapGerm::identity(1, m, base.clone(), 5).phi());
    let lam = th(m, 0);
    let b = G::from_i64(m, 2);
    let tr = contactmap::contact_from_psi(&one, &J::constant(0, base.clone(), 5, lam.clone()), &b).unwrap();
    let expect = contactmap::translation(base.clone(), 5, &b, &[lam]).unwrap();
    assert_eq!(tr.phi(), expect.phi());
    assert_eq!(tr.psi(), expect.psi());
    let dil = contactmap::contact_from_psi(&one.scale(&q(3, 1)), &zero, &G::zero(m)).unwrap();
    assert_eq!(dil.phi(), &J::x(1, m, base, 5).scale(&q(9, 1)));
}

#[test]
fn sign_flip_shares_phi() {
    let mut rng = random::rng(11);
    let g = contactmap::random_k1::<Q>(&mut rng, 3, q(1, 1), 5, 4).unwrap();
    let psi = &g.psi()[0];
    let p1 = J::from_terms(0, 3, q(1, 1), 5, psi.terms().filter(|t| t.0 == 0).map(|(_, j, c)| (0, j, c.clone()))).unwrap();
    let p0 = J::from_terms(0, 3, q(1, 1), 5, psi.terms().filter(|t| t.0 == 1).map(|(_, j, c)| (0, j, c.clone()))).unwrap();
    let c = g.phi().coeff(0, 0);
    let flipped = contactmap::contact_from_psi(&-&p0, &-&p1, &c).unwrap();
    assert_eq!(flipped.phi(), g.phi());
    assert_eq!(flipped.psi()[0], -&g.psi()[0]);
}

#[test]
fn germ_composition_laws() {
    let m = 2;
    let t1 = contactmap::translation(q(3, 1), 5, &G::from_i64(m, 1), &[th(m, 0)]).unwrap();
    let t2 = contactmap::translation(q(1, 1), 5, &G::from_i64(m, 2), &[th(m, 1)]).unwrap();
    let comp = t1.compose(&t2, 0.0).unwrap();
    let direct = contactmap::translation(q(1, 1), 4, &(&G::from_i64(m, 3) - &(&th(m, 0) * &th(m, 1))), &[&th(m, 0) + &th(m, 1)]).unwrap();
    assert_eq!(comp.phi().truncate(4), *direct.phi());
    assert_eq!(comp.psi()[0].truncate(4), direct.psi()[0]);
    let d = contactmap::dilatation(1, m, q(1, 4), 5, &q(2, 1)).unwrap();
    let dinv = contactmap::dilatation(1, m, q(1, 1), 5, &q(1, 2)).unwrap();
    let id = d.compose(&dinv, 0.0).unwrap();
    assert_eq!(id.phi(), MapGerm::identity(1, m, q(1, 1), 5).phi());
}

#[test]
fn multiplier_is_a_cocycle() {
    let mut rng = random::rng(5);
    for _ in 0..5 {
        let inner = contactmap::random_k1::<Q>(&mut rng, 3, q(0, 1), 6, 4).unwrap();
        let outer = contactmap::random_k1::<Q>(&mut rng, 3, inner.image_base().x.body(), 6, 4).unwrap();
        let comp = outer.compose(&inner, 0.0).unwrap();
        let lhs = comp.multiplier(0.0).unwrap();
        let rhs = &inner.pullback(&outer.multiplier(0.0).unwrap(), 0.0).unwrap() * &inner.multiplier(0.0).unwrap();
        let k = lhs.order().min(rhs.order());
        assert!(k >= 2);
        assert_eq!(lhs.truncate(k), rhs.truncate(k));
    }
}

fn valid(h: &OspMatrix<Q>) -> bool {
    h.validate().is_zero()
}

#[test]
fn generators_satisfy_relations() {
    let m = 4;
    let b = G::from_i64(m, 2);
    let beta = vec![th(m, 0), th(m, 1)];
    assert!(valid(&OspMatrix::identity(2, m)));
    assert!(valid(&ospgroup::translation(&b, &beta).unwrap()));
    assert!(valid(&ospgroup::translation(&b, &beta[..1]).unwrap()));
    assert!(valid(&ospgroup::lower(&b, &beta).unwrap()));
    assert!(valid(&ospgroup::inversion::<Q>(2, m).unwrap()));
    assert!(valid(&ospgroup::dilatation(2, m, &G::from_i64(m, 3)).unwrap()));
    let mut bad = OspMatrix::identity(1, m).scale(&q(1, 1));
    bad = ospgroup::dilatation(1, m, &G::from_i64(m, 2)).unwrap().checked_mul(&bad).unwrap();
    let doubled = OspMatrix::from_blocks(
        G::from_i64(m, 2), G::zero(m), G::zero(m), G::one(m),
        vec![G::zero(m)], vec![G::zero(m)], vec![G::zero(m)], vec![G::zero(m)], vec![vec![G::one(m)]],
    ).unwrap();
    assert_eq!(doubled.validate().det, G::one(m));
    assert!(valid(&bad));
    let mut rng = random::rng(1);
    for n in 1..=2 {
        for _ in 0..10 {
            assert!(valid(&ospgroup::random_word::<Q>(&mut rng, n, m, 4).unwrap()));
        }
    }
}

#[test]
fn berezinian_examples() {
    let m = 2;
    assert_eq!(OspMatrix::<Q>::identity(1, m).berezinian().unwrap(), G::one(m));
    assert_eq!(ospgroup::dilatation(1, m, &G::from_i64(m, 5)).unwrap().berezinian().unwrap(), G::one(m));
    let refl = ospgroup::odd_reflection::<Q>(1, m).unwrap();
    assert_eq!(refl.berezinian().unwrap(), G::from_i64(m, -1));
    let h = ospgroup::random_spo21::<Q>(&mut random::rng(9), m).unwrap();
    assert_eq!(h.berezinian().unwrap(), G::one(m));
}

#[test]
fn action_examples() {
    let m = 2;
    let id = OspMatrix::<Q>::identity(1, m).action_germ(q(1, 1), 5, 0.0).unwrap();
    assert_eq!(id, MapGerm::identity(1, m, q(1, 1), 5));
    let b = G::from_i64(m, 2);
    let tr = ospgroup::translation(&b, &[th(m, 0)]).unwrap().action_germ(q(1, 1), 5, 0.0).unwrap();
    let direct = contactmap::translation(q(1, 1), 5, &b, &[th(m, 0)]).unwrap();
    assert_eq!(tr.phi(), direct.phi());
    let inv = ospgroup::inversion::<Q>(1, m).unwrap().action_germ(q(1, 1), 5, 0.0).unwrap();
    let x = J::x(1, m, q(1, 1), 5);
    assert_eq!(inv.phi(), &-&x.inv().unwrap());
    assert!(ospgroup::inversion::<Q>(1, m).unwrap().action_germ(q(0, 1), 5, 0.0).is_err());
}

#[test]
fn action_is_a_homomorphism_with_kernel() {
    let m = 3;
    let mut rng = random::rng(2);
    for n in 1..=2 {
        for _ in 0..5 {
            let h1 = ospgroup::random_word::<Q>(&mut rng, n, m, 2).unwrap();
            let h2 = ospgroup::random_word::<Q>(&mut rng, n, m, 2).unwrap();
            let base = q(1, 3);
            let Ok(inner) = h2.action_germ(base.clone(), 4, 0.0) else { continue };
            let Ok(outer) = h1.action_germ(inner.image_base().x.body(), 4, 0.0) else { continue };
            let direct = h1.checked_mul(&h2).unwrap().action_germ(base, 4, 0.0).unwrap();
            let comp = outer.compose(&inner, 0.0).unwrap();
            let k = comp.order();
            assert_eq!(comp.phi().truncate(k), direct.phi().truncate(k));
            assert_eq!(comp.psi()[0].truncate(k), direct.psi()[0].truncate(k));
            let neg = h1.scale(&q(-1, 1));
            let p = SuperPoint::new(&G::from_i64(m, 1) + &(&th(m, 0) * &th(m, 1)), vec![th(m, 2); n]).unwrap();
            if let (Ok(a), Ok(b)) = (h1.act(&p), neg.act(&p)) {
                assert_eq!(a, b);
            }
        }
    }
}

#[test]
fn factorization_roundtrip() {
    let m = 2;
    let id = OspMatrix::<Q>::identity(1, m).factorize().unwrap();
    assert_eq!((id.a.clone(), id.eps), (G::one(m), 1));
    assert!(id.b.is_zero() && id.c.is_zero() && id.beta.is_zero() && id.delta.is_zero());
    let tr = ospgroup::translation(&G::from_i64(m, 3), &[th(m, 0)]).unwrap().factorize().unwrap();
    assert!(tr.c.is_zero() && tr.delta.is_zero());
    assert_eq!(tr.a, G::one(m));
    let dil = ospgroup::dilatation(1, m, &G::from_i64(m, 3)).unwrap().factorize().unwrap();
    assert_eq!(dil.a, G::from_i64(m, 3));
    assert!(dil.b.is_zero() && dil.c.is_zero() && dil.beta.is_zero() && dil.delta.is_zero());
    let mut rng = random::rng(4);
    for _ in 0..20 {
        let h = ospgroup::random_word::<Q>(&mut rng, 1, m, 3).unwrap();
        match h.factorize() {
            Ok(f) => assert_eq!(f.product(m).unwrap(), h),
            Err(supercontact::Error::NonGeneric(_)) => assert!(h.a().body().is_zero()),
            Err(e) => panic!("{e}"),
        }
    }
    assert!(ospgroup::inversion::<Q>(1, m).unwrap().factorize().is_err());
}

fn soul_point(m: u8, x: Q, a: usize, b: usize, c: i64) -> SuperPoint<Q> {
    let x = &G::scalar(m, x) + &(&th(m, a) * &th(m, b)).scale(&q(c, 1));
    SuperPoint::new(x, vec![&th(m, a) + &th(m, b).scale(&q(c, 2))]).unwrap()
}

#[test]
fn normalizers_satisfy_their_definitions() {
    let m = 4;
    let t1 = soul_point(m, q(0, 1), 0, 1, 1);
    let t2 = soul_point(m, q(1, 1), 1, 2, 2);
    let t3 = soul_point(m, q(25, 16), 2, 3, -1);
    let e = ospgroup::euclid_normalize(&t1).unwrap();
    assert_eq!(e.act(&t1).unwrap(), SuperPoint::origin(1, m));
    let origin = SuperPoint::origin(1, m);
    assert_eq!(ospgroup::euclid_normalize(&origin).unwrap(), OspMatrix::identity(1, m));
    let a = ospgroup::affine_normalize(&t1, &t2).unwrap();
    assert_eq!(a.act(&t1).unwrap(), origin);
    assert_eq!(a.act(&t2).unwrap().x, G::one(m));
    let (kp, km) = ospgroup::proj_normalize(&t1, &t2, &t3).unwrap();
    for k in [&kp, &km] {
        assert!(valid(k));
        assert_eq!(k.act(&t2).unwrap(), origin);
        assert_eq!(k.act(&t3).unwrap().x, G::one(m));
        assert!(k.denominator_at(&t1).unwrap().body().is_zero());
    }
    assert!(kp.denominator_at(&t1).unwrap().is_zero());
    assert_eq!(km.act(&t3).unwrap().xi[0], -&kp.act(&t3).unwrap().xi[0]);
    let p = |x: i64| SuperPoint::new(Grassmann::<f64>::from_i64(1, x), vec![Grassmann::zero(1)]).unwrap();
    let (k, _) = ospgroup::proj_normalize(&p(-1), &p(0), &p(1)).unwrap();
    let g = ospgroup::affine_normalize(&p(0), &p(1)).unwrap();
    assert_eq!(g, OspMatrix::identity(1, 1));
    assert!((k.a() * k.a()).checked_sub(&Grassmann::from_i64(1, 2)).unwrap().max_abs() < 1e-12);
    assert!(k.alpha(0).is_zero());
}

#[test]
fn constructive_invariants_match_closed_forms() {
    let m = 4;
    let t1 = soul_point(m, q(0, 1), 0, 1, 1);
    let t2 = soul_point(m, q(1, 1), 1, 2, 2);
    let t3 = soul_point(m, q(25, 16), 2, 3, -1);
    let t4 = soul_point(m, q(3, 1), 0, 3, 3);
    let pts = [t1, t2, t3, t4];
    for kind in [Kind::Euclid, Kind::Affine] {
        let n = kind.arity();
        let a = invariants::constructive_invariant(kind, &pts[..n]).unwrap();
        let b = invariants::closed_form_invariant(kind, &pts[..n]).unwrap();
        assert_eq!(a, b, "{kind:?}");
    }
    let a = invariants::constructive_invariant(Kind::Projective, &pts).unwrap();
    let b = invariants::closed_form_invariant(Kind::Projective, &pts).unwrap();
    assert_eq!(a.even, b.even);
    assert_eq!(invariants::odd_discrepancy(&a, &b), 0.0);
}

#[test]
fn k2_sample_examples() {
    let m = 4;
    let id = contactmap::k2_sample::<Q>(&[], m, q(0, 1), 5, 0.0).unwrap();
    assert_eq!(id, MapGerm::identity(2, m, q(0, 1), 5));
    let rot = K2Step::Lift { shift: q(0, 1), slope_root: q(1, 1), higher: vec![], t: q(1, 1) };
    let g = contactmap::k2_sample(&[rot], m, q(0, 1), 5, 0.0).unwrap();
    assert_eq!(g.psi()[0].truncate(4), -&J::xi(2, m, q(0, 1), 4, 1).unwrap());
    let cube = K2Step::Lift { shift: q(0, 1), slope_root: q(1, 1), higher: vec![q(1, 1)], t: q(0, 1) };
    let g = contactmap::k2_sample(&[cube], m, q(1, 1), 6, 0.0).unwrap();
    let _ = g.multiplier(0.0).unwrap();
    let mut rng = random::rng(8);
    for _ in 0..10 {
        let g = contactmap::random_k2::<Q>(&mut rng, m, q(1, 2), 7, 4, 0.0).unwrap();
        let e = g.multiplier(0.0).unwrap();
        let (d1, d2) = (g.psi().iter().map(|p| p.d(0).unwrap()).collect::<Vec<_>>(), g.psi().iter().map(|p| p.d(1).unwrap()).collect::<Vec<_>>());
        let cross = &(&d1[0] * &d2[0]) + &(&d1[1] * &d2[1]);
        assert!(cross.is_zero());
        assert!(e.order() >= 2, "order {}", e.order());
    }
}
