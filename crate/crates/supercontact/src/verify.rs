//! Seeded verification suites: each check runs a number of independent
//! trials and records its largest residual.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cartan::{self, EpsComparison, VectorField};
use crate::cocycles::{self, Cocycle, Density};
use crate::contactmap::{self, MapGerm, SuperPoint};
use crate::error::{Error, Result};
use crate::grassmann::Grassmann;
use crate::invariants::{self, Kind};
use crate::literal;
use crate::ospgroup::{self, OspMatrix};
use crate::random::{self, SeededRng};
use crate::scalar::Scalar;
use crate::superjet::SuperJet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Algebra,
    Invariants,
    Osp,
    Cocycles,
    Cartan,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Algebra, Suite::Invariants, Suite::Osp, Suite::Cocycles, Suite::Cartan];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Invariants => "invariants",
            Suite::Osp => "osp",
            Suite::Cocycles => "cocycles",
            Suite::Cartan => "cartan",
        }
    }

    /// Parses a suite name; `all` yields every suite.
    pub fn parse(s: &str) -> Option<Vec<Suite>> {
        if s == "all" {
            return Some(Suite::ALL.to_vec());
        }
        Suite::ALL.iter().copied().find(|x| x.name() == s).map(|x| vec![x])
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub suites: Vec<Suite>,
    /// Restricts to checks on S^{1|n}.
    pub n: Option<usize>,
    /// Jet order of the sampled germs.
    pub order: i32,
    /// Tolerance for floating checks.
    pub tol: f64,
    pub seed: u64,
    /// Overrides every check's trial count.
    pub trials: Option<usize>,
    /// Restricts to checks whose id starts with one of these prefixes.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub only: Vec<String>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { suites: Suite::ALL.to_vec(), n: None, order: 6, tol: 1e-9, seed: 0, trials: None, only: vec![] }
    }
}

/// The outcome of one trial.
#[derive(Clone, Debug)]
pub struct Trial {
    pub ok: bool,
    /// Largest residual magnitude, or the tested magnitude for checks that
    /// require a non-zero value.
    pub residual: f64,
    /// Literals of the trial's inputs.
    pub inputs: Vec<String>,
    pub note: Option<String>,
}

impl Trial {
    fn new(ok: bool, residual: f64, inputs: Vec<String>) -> Self {
        Trial { ok, residual, inputs, note: None }
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.note = Some(s.into());
        self
    }
}

fn jets_vanish<'a, S: Scalar>(jets: impl IntoIterator<Item = &'a SuperJet<S>>, tol: f64) -> (bool, f64) {
    let mut exact = true;
    let mut worst = 0.0f64;
    for j in jets {
        exact &= j.is_zero();
        worst = worst.max(j.max_abs());
    }
    (if S::EXACT { exact } else { worst <= tol }, worst)
}

fn numbers_vanish<'a, S: Scalar>(xs: impl IntoIterator<Item = &'a Grassmann<S>>, tol: f64) -> (bool, f64) {
    let mut exact = true;
    let mut worst = 0.0f64;
    for x in xs {
        exact &= x.is_zero();
        worst = worst.max(x.max_abs());
    }
    (if S::EXACT { exact } else { worst <= tol }, worst)
}

fn zero_jets<'a, S: Scalar>(jets: impl IntoIterator<Item = &'a SuperJet<S>>, tol: f64, inputs: Vec<String>) -> Trial {
    let (ok, r) = jets_vanish(jets, tol);
    Trial::new(ok, r, inputs)
}

fn zero_numbers<'a, S: Scalar>(xs: impl IntoIterator<Item = &'a Grassmann<S>>, tol: f64, inputs: Vec<String>) -> Trial {
    let (ok, r) = numbers_vanish(xs, tol);
    Trial::new(ok, r, inputs)
}

/// Floating tolerance scale for residuals built from these germs.
fn germ_scale<S: Scalar>(gs: &[&MapGerm<S>]) -> f64 {
    gs.iter().map(|g| g.scale()).product()
}

/// Floating tolerance scale for residuals quadratic in these jets.
fn jet_scale<S: Scalar>(js: &[&SuperJet<S>]) -> f64 {
    js.iter().map(|j| j.max_abs().max(1.0).powi(2)).product()
}

/// `a − b` at the common order; relative to the larger side for floating scalars.
fn diff_jets<S: Scalar>(a: &SuperJet<S>, b: &SuperJet<S>) -> Result<SuperJet<S>> {
    let o = a.order().min(b.order());
    let d = a.truncate(o).checked_sub(&b.truncate(o))?;
    if S::EXACT {
        Ok(d)
    } else {
        Ok(d.scale(&S::from_f64(1.0 / a.max_abs().max(b.max_abs()).max(1.0))))
    }
}

/// Sampling parameters shared by the checks.
#[derive(Clone, Debug)]
pub struct Ctx {
    pub m: u8,
    pub order: i32,
    pub tol: f64,
}

pub type RunFn = fn(&Ctx, &mut SeededRng) -> Result<Trial>;

#[derive(Clone)]
pub struct CheckDef {
    pub id: &'static str,
    pub suite: Suite,
    pub n: Option<usize>,
    pub trials: usize,
    pub run: RunFn,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub trial: usize,
    pub reason: String,
    pub inputs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub suite: Suite,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub seed: u64,
    pub trials: usize,
    pub failures: usize,
    /// Failures where the trial raised an error instead of a residual.
    pub errors: usize,
    pub passed: bool,
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<Failure>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub backend: String,
    pub config: VerifyConfig,
    pub results: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }
}

/// Stable per-check seed offset (FNV-1a of the id).
fn id_hash(id: &str) -> u64 {
    id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

pub fn check_seed(seed: u64, id: &str) -> u64 {
    seed ^ id_hash(id)
}

fn m_for(n: Option<usize>) -> u8 {
    match n {
        Some(3) => 2,
        _ => 4,
    }
}

/// Runs one check for `trials` seeded trials in parallel.
pub fn run_check(def: &CheckDef, seed: u64, trials: usize, order: i32, tol: f64) -> CheckResult {
    let ctx = Ctx { m: m_for(def.n), order, tol };
    let s = check_seed(seed, def.id);
    let outcomes: Vec<(usize, Result<Trial>)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = random::trial_rng(s, t as u64);
            (t, (def.run)(&ctx, &mut rng))
        })
        .collect();
    let mut failures = 0;
    let mut errors = 0;
    let mut worst = 0.0f64;
    let mut first = None;
    let mut note = None;
    for (t, out) in outcomes {
        match out {
            Ok(tr) => {
                worst = worst.max(tr.residual);
                if note.is_none() {
                    note = tr.note.clone();
                }
                if !tr.ok {
                    failures += 1;
                    if first.is_none() {
                        first = Some(Failure { trial: t, reason: "residual".into(), inputs: tr.inputs });
                    }
                }
            }
            Err(e) => {
                failures += 1;
                errors += 1;
                if first.is_none() {
                    first = Some(Failure { trial: t, reason: e.to_string(), inputs: vec![] });
                }
            }
        }
    }
    CheckResult {
        id: def.id.to_string(),
        suite: def.suite,
        n: def.n,
        seed: s,
        trials,
        failures,
        errors,
        passed: failures == 0 && trials > 0,
        max_residual: worst,
        note,
        first_failure: first,
    }
}

/// Every check, in id order.
pub fn checks<S: Scalar>() -> Vec<CheckDef> {
    use Suite::*;
    let c = |id, suite, n, trials, run: RunFn| CheckDef { id, suite, n, trials, run };
    let mut v = vec![
        c("algebra.grassmann_ring", Algebra, None, 100, grassmann_ring::<S>),
        c("algebra.jet_identities.n1", Algebra, Some(1), 50, |x, r| jet_identities::<S>(x, r, 1)),
        c("algebra.jet_identities.n2", Algebra, Some(2), 50, |x, r| jet_identities::<S>(x, r, 2)),
        c("algebra.germ_associativity.n1", Algebra, Some(1), 25, germ_associativity::<S>),
        c("algebra.multiplier_chain.n1", Algebra, Some(1), 50, |x, r| multiplier_chain::<S>(x, r, 1)),
        c("algebra.multiplier_chain.n2", Algebra, Some(2), 25, |x, r| multiplier_chain::<S>(x, r, 2)),
        c("invariants.bracket_identity.n1", Invariants, Some(1), 100, |x, r| bracket_identity::<S>(x, r, 1)),
        c("invariants.bracket_identity.n2", Invariants, Some(2), 100, |x, r| bracket_identity::<S>(x, r, 2)),
        c("invariants.cross_ratio_spo21.n1", Invariants, Some(1), 50, cross_ratio_spo21::<S>),
        c("invariants.cross_ratio_pc22.n2", Invariants, Some(2), 25, cross_ratio_pc22::<S>),
        c("invariants.euclid_invariance.n1", Invariants, Some(1), 50, |x, r| euclid_invariance::<S>(x, r, 1)),
        c("invariants.euclid_invariance.n2", Invariants, Some(2), 50, |x, r| euclid_invariance::<S>(x, r, 2)),
        c("invariants.affine_invariance.n1", Invariants, Some(1), 50, |x, r| affine_invariance::<S>(x, r, 1)),
        c("invariants.affine_invariance.n2", Invariants, Some(2), 50, |x, r| affine_invariance::<S>(x, r, 2)),
        c("invariants.dual_path.euclid.n1", Invariants, Some(1), 50, |x, r| dual_path::<S>(x, r, 1, Kind::Euclid)),
        c("invariants.dual_path.euclid.n2", Invariants, Some(2), 50, |x, r| dual_path::<S>(x, r, 2, Kind::Euclid)),
        c("invariants.dual_path.affine.n1", Invariants, Some(1), 50, |x, r| dual_path::<S>(x, r, 1, Kind::Affine)),
        c("invariants.dual_path.affine.n2", Invariants, Some(2), 50, |x, r| dual_path::<S>(x, r, 2, Kind::Affine)),
        c("invariants.dual_path.projective.n1", Invariants, Some(1), 50, |x, r| dual_path::<S>(x, r, 1, Kind::Projective)),
        c("invariants.dual_path.projective.n2", Invariants, Some(2), 50, |x, r| dual_path::<S>(x, r, 2, Kind::Projective)),
        c("invariants.jp_dual.n1", Invariants, Some(1), 50, jp_dual),
        c("invariants.odd_radical.n1", Invariants, Some(1), 50, odd_radical),
        c("invariants.ord_parity", Invariants, None, 20, ord_parity::<S>),
        c("osp.relations.n1", Osp, Some(1), 50, |x, r| osp_relations::<S>(x, r, 1)),
        c("osp.relations.n2", Osp, Some(2), 50, |x, r| osp_relations::<S>(x, r, 2)),
        c("osp.factorization.n1", Osp, Some(1), 50, factorization::<S>),
        c("osp.action_homomorphism.n1", Osp, Some(1), 25, |x, r| action_homomorphism::<S>(x, r, 1)),
        c("osp.action_homomorphism.n2", Osp, Some(2), 25, |x, r| action_homomorphism::<S>(x, r, 2)),
        c("cocycles.s1_kernel.n1", Cocycles, Some(1), 50, s1_kernel::<S>),
        c("cocycles.s2_kernel.n2", Cocycles, Some(2), 25, s2_kernel::<S>),
        c("cocycles.law_k1.n1", Cocycles, Some(1), 100, law_k1::<S>),
        c("cocycles.law_k1_extra.n1", Cocycles, Some(1), 25, law_k1_extra::<S>),
        c("cocycles.law_k2.n2", Cocycles, Some(2), 50, law_k2::<S>),
        c("cocycles.law_k2_extra.n2", Cocycles, Some(2), 10, law_k2_extra::<S>),
        c("cocycles.s1_triple.n1", Cocycles, Some(1), 50, s1_triple::<S>),
        c("cocycles.s2_dual.n2", Cocycles, Some(2), 50, s2_dual::<S>),
        c("cocycles.cars.n1", Cocycles, Some(1), 50, cars::<S>),
        c("cocycles.sections.n1", Cocycles, Some(1), 50, sections::<S>),
        c("cocycles.s2_relations.n2", Cocycles, Some(2), 50, s2_relations::<S>),
        c("cocycles.classical_reduction.n1", Cocycles, Some(1), 25, classical_reduction::<S>),
        c("cartan.projective.n0", Cartan, Some(0), 25, |x, r| cartan_projective::<S>(x, r, 0)),
        c("cartan.projective.n1", Cartan, Some(1), 25, |x, r| cartan_projective::<S>(x, r, 1)),
        c("cartan.projective.n2", Cartan, Some(2), 25, |x, r| cartan_projective::<S>(x, r, 2)),
        c("cartan.x_squared.n0", Cartan, Some(0), 1, x_squared::<S>),
        c("cartan.euclid.n1", Cartan, Some(1), 50, |x, r| cartan_euclid::<S>(x, r, 1)),
        c("cartan.euclid.n2", Cartan, Some(2), 50, |x, r| cartan_euclid::<S>(x, r, 2)),
        c("cartan.affine.n1", Cartan, Some(1), 50, |x, r| cartan_affine::<S>(x, r, 1)),
        c("cartan.affine.n2", Cartan, Some(2), 50, |x, r| cartan_affine::<S>(x, r, 2)),
        c("cartan.first_order.n1", Cartan, Some(1), 25, |x, r| first_order::<S>(x, r, 1)),
        c("cartan.first_order.n2", Cartan, Some(2), 25, |x, r| first_order::<S>(x, r, 2)),
        c("cartan.lie_vs_group.n1", Cartan, Some(1), 25, lie_vs_group::<S>),
        c("cartan.n3_obstruction.n3", Cartan, Some(3), 1, n3_obstruction::<S>),
    ];
    v.sort_by(|a, b| a.id.cmp(b.id));
    v
}

/// Runs every check selected by the configuration; results sorted by id.
pub fn run<S: Scalar>(cfg: &VerifyConfig) -> Report {
    let defs: Vec<CheckDef> = checks::<S>()
        .into_iter()
        .filter(|d| cfg.suites.contains(&d.suite))
        .filter(|d| cfg.n.is_none() || d.n.is_none() || d.n == cfg.n)
        .filter(|d| cfg.only.is_empty() || cfg.only.iter().any(|p| d.id.starts_with(p.as_str())))
        .collect();
    let mut results: Vec<CheckResult> = defs
        .iter()
        .map(|d| run_check(d, cfg.seed, cfg.trials.unwrap_or(d.trials), cfg.order, cfg.tol))
        .collect();
    results.sort_by(|a, b| a.id.cmp(&b.id));
    Report { backend: S::BACKEND.name().to_string(), config: cfg.clone(), results }
}

/// Per-suite aggregate of a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub trials: usize,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub backend: String,
    pub seed: u64,
    pub suites: Vec<SuiteSummary>,
    pub failed_checks: Vec<String>,
}

pub fn summarize(report: &Report) -> Summary {
    let mut suites: Vec<SuiteSummary> = Vec::new();
    for r in &report.results {
        let s = match suites.iter_mut().find(|s| s.suite == r.suite) {
            Some(s) => s,
            None => {
                suites.push(SuiteSummary { suite: r.suite, checks: 0, passed: 0, failed: 0, trials: 0, max_residual: 0.0 });
                suites.last_mut().expect("just pushed")
            }
        };
        s.checks += 1;
        s.trials += r.trials;
        if r.passed {
            s.passed += 1;
        } else {
            s.failed += 1;
        }
        s.max_residual = s.max_residual.max(r.max_residual);
    }
    suites.sort_by_key(|s| s.suite);
    Summary {
        backend: report.backend.clone(),
        seed: report.config.seed,
        suites,
        failed_checks: report.results.iter().filter(|r| !r.passed).map(|r| r.id.clone()).collect(),
    }
}

// Sampling helpers.

fn point<S: Scalar>(rng: &mut SeededRng, n: usize, m: u8, body: S) -> SuperPoint<S> {
    let x = random::even_constant(rng, m, body);
    let xi = (0..n).map(|_| random::odd_constant(rng, m)).collect();
    SuperPoint::new(x, xi).expect("parities by construction")
}

/// `count` points with distinct random bodies.
fn points<S: Scalar>(rng: &mut SeededRng, n: usize, m: u8, count: usize) -> Vec<SuperPoint<S>> {
    let mut bodies: Vec<i64> = (-12..=12).collect();
    bodies.shuffle(rng);
    bodies[..count].iter().map(|&b| point(rng, n, m, S::from_ratio(b, 2))).collect()
}

fn k1<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng, base: S) -> Result<MapGerm<S>> {
    contactmap::random_k1(rng, ctx.m, base, ctx.order, 4)
}

fn k2<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng, base: S) -> Result<MapGerm<S>> {
    contactmap::random_k2(rng, ctx.m, base, ctx.order, 3, ctx.tol)
}

fn germ_n<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng, n: usize, base: S) -> Result<MapGerm<S>> {
    match n {
        0 => {
            let mut f = cartan::random_jet(rng, 0, ctx.m, base.clone(), ctx.order, 4, false)?;
            let c1 = f.coeff(0, 1).soul().checked_add(&Grassmann::scalar(ctx.m, random::nonzero_rational(rng, 3)))?;
            f.set(0, 1, c1);
            let c0 = f.coeff(0, 0).soul().checked_add(&Grassmann::scalar(ctx.m, base))?;
            f.set(0, 0, c0);
            MapGerm::new(f, vec![])?.certify(ctx.tol)
        }
        1 => k1(ctx, rng, base),
        2 => k2(ctx, rng, base),
        _ => Err(Error::Precondition(format!("no germ sampler for N = {n}"))),
    }
}

fn act_all<S: Scalar>(h: &OspMatrix<S>, pts: &[SuperPoint<S>]) -> Result<Vec<SuperPoint<S>>> {
    pts.iter().map(|p| h.act(p)).collect()
}

fn pts_lit<S: Scalar>(pts: &[SuperPoint<S>]) -> String {
    literal::format_points(pts)
}

// algebra

fn grassmann_ring<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng) -> Result<Trial> {
    let m = ctx.m;
    let even = |rng: &mut SeededRng| {
        let b = random::small_rational(rng, 3);
        random::even_constant::<S>(rng, m, b)
    };
    let a = &even(rng) + &random::odd_constant(rng, m);
    let b = &even(rng) + &random::odd_constant(rng, m);
    let c = &even(rng) + &random::odd_constant(rng, m);
    let u = random::odd_constant::<S>(rng, m);
    let v = random::odd_constant::<S>(rng, m);
    let eb = random::nonzero_rational(rng, 3);
    let e = random::even_constant::<S>(rng, m, eb);
    let mut res = vec![
        &(&(&a * &b) * &c) - &(&a * &(&b * &c)),
        &(&a * &(&b + &c)) - &(&(&a * &b) + &(&a * &c)),
        &(&u * &v) + &(&v * &u),
        &u * &u,
        &(&e * &a) - &(&a * &e),
        &(&e * &e.inv()?) - &Grassmann::one(m),
    ];
    let mut nil = a.soul();
    for _ in 0..m {
        nil = &nil * &a.soul();
    }
    res.push(nil);
    Ok(zero_numbers(&res, ctx.tol, vec![]))
}

fn jet_identities<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng, n: usize) -> Result<Trial> {
    let base = random::small_rational::<S>(rng, 2);
    let mut f = cartan::random_jet(rng, n, ctx.m, base.clone(), ctx.order, 4, false)?;
    let c0 = f.coeff(0, 0).soul().checked_add(&Grassmann::scalar(ctx.m, random::nonzero_rational(rng, 3)))?;
    f.set(0, 0, c0);
    let g = cartan::random_jet(rng, n, ctx.m, base, ctx.order, 4, true)?;
    let mut res = Vec::new();
    for i in 0..n {
        res.push(diff_jets(&f.d(i)?.d(i)?, &f.dx())?);
        res.push(diff_jets(&g.d(i)?.d(i)?, &g.dx())?);
        for j in 0..n {
            if i != j {
                res.push(f.d_seq(&[i, j])?.checked_add(&f.d_seq(&[j, i])?)?);
            }
        }
        let leibniz = f.checked_mul(&g)?.d(i)?;
        let expect = f.d(i)?.checked_mul(&g)?.checked_add(&f.checked_mul(&g.d(i)?)?)?;
        res.push(diff_jets(&leibniz, &expect)?);
    }
    res.push(diff_jets(&f.checked_mul(&f.inv()?)?, &SuperJet::one(n, ctx.m, f.base().clone(), ctx.order))?);
    let sq = f.checked_mul(&f)?;
    let root = sq.sqrt()?;
    res.push(diff_jets(&root.checked_mul(&root)?, &sq)?);
    Ok(zero_jets(&res, ctx.tol * jet_scale(&[&f, &g]) * jet_scale(&[&f.inv()?]), vec![literal::format_jet(&f), literal::format_jet(&g)]))
}

fn germ_associativity<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng) -> Result<Trial> {
    let c = k1(ctx, rng, S::zero())?;
    let b = k1(ctx, rng, c.image_base().x.body())?;
    let a = k1(ctx, rng, b.image_base().x.body())?;
    let l = a.compose(&b, ctx.tol)?.compose(&c, ctx.tol)?;
    let r = a.compose(&b.compose(&c, ctx.tol)?, ctx.tol)?;
    let mut res = vec![diff_jets(l.phi(), r.phi())?, diff_jets(&l.psi()[0], &r.psi()[0])?];
    res.extend(l.contact_residuals()?);
    let inputs = [&a, &b, &c].iter().map(|g| literal::format_germ(g)).collect();
    Ok(zero_jets(&res, ctx.tol * germ_scale(&[&a, &b, &c]), inputs))
}

fn multiplier_chain<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng, n: usize) -> Result<Trial> {
    let psi = germ_n(ctx, rng, n, S::zero())?;
    let phi = germ_n(ctx, rng, n, psi.image_base().x.body())?;
    let comp = phi.compose(&psi, ctx.tol)?;
    let lhs = comp.multiplier(ctx.tol)?;
    let rhs = psi.pullback(&phi.multiplier(ctx.tol)?, ctx.tol)?.checked_mul(&psi.multiplier(ctx.tol)?)?;
    let d = diff_jets(&lhs, &rhs)?;
    Ok(zero_jets([&d], ctx.tol, vec![literal::format_germ(&phi), literal::format_germ(&psi)]))
}

// invariants

fn bracket_identity<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng, n: usize) -> Result<Trial> {
    let p = points::<S>(rng, n, ctx.m, 3);
    let r = invariants::bracket_identity(&p[0], &p[1], &p[2])?;
    Ok(zero_numbers([&r], ctx.tol, vec![pts_lit(&p)]))
}

/// Retries `f` on fresh draws while it reports a pole.
fn avoiding_poles<T>(rng: &mut SeededRng, mut f: impl FnMut(&mut SeededRng) -> Result<T>) -> Result<T> {
    for _ in 0..64 {
        match f(rng) {
            Err(Error::Precondition(_)) | Err(Error::NotInvertible) => continue,
            other => return other,
        }
    }
    Err(Error::Precondition("no admissible draw".into()))
}

fn cross_ratio_under<S: Scalar>(ctx: &Ctx, pts: &[SuperPoint<S>], h: &OspMatrix<S>) -> Result<Trial> {
    let img = act_all(h, pts)?;
    let before = invariants::cross_ratio([&pts[0], &pts[1], &pts[2], &pts[3]])?;
    let after = invariants::cross_ratio([&img[0], &img[1], &img[2], &img[3]])?;
    let d = &after - &before;
    Ok(zero_numbers([&d], ctx.tol, vec![pts_lit(pts), literal::format_matrix(h)]))
}

fn cross_ratio_spo21<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng) -> Result<Trial> {
    let pts = points::<S>(rng, 1, ctx.m, 4);
    avoiding_poles(rng, |rng| {
        let h = ospgroup::random_spo21::<S>(rng, ctx.m)?;
        cross_ratio_under(ctx, &pts, &h)
    })
}

fn cross_ratio_pc22<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng) -> Result<Trial> {
    let pts = points::<S>(rng, 2, ctx.m, 4);
    avoiding_poles(rng, |rng| {
        let h = ospgroup::random_word::<S>(rng, 2, ctx.m, 4)?;
        cross_ratio_under(ctx, &pts, &h)
    })
}

fn random_translation<S: Scalar>(rng: &mut SeededRng, n: usize, m: u8) -> Result<OspMatrix<S>> {
    let bb = random::small_rational(rng, 3);
    let b = random::even_constant(rng, m, bb);
    let beta: Vec<_> = (0..n).map(|_| random::odd_constant(rng, m)).collect();
    ospgroup::translation(&b, &beta)
}

fn euclid_invariance<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng, n: usize) -> Result<Trial> {
    let p = points::<S>(rng, n, ctx.m, 2);
    let h = random_translation::<S>(rng, n, ctx.m)?;
    let q = act_all(&h, &p)?;
    let a = invariants::euclid_invariant(&p[0], &p[1])?;
    let b = invariants::euclid_invariant(&q[0], &q[1])?;
    let mut d = vec![&a.even - &b.even];
    d.extend(a.odd.iter().zip(&b.odd).map(|(x, y)| x - y));
    Ok(zero_numbers(&d, ctx.tol, vec![pts_lit(&p), literal::format_matrix(&h)]))
}

fn affine_invariance<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng, n: usize) -> Result<Trial> {
    let p = points::<S>(rng, n, ctx.m, 3);
    let ab = random::positive_rational(rng, 3);
    let a = random::even_constant(rng, ctx.m, ab);
    let bb = random::small_rational(rng, 3);
    let b = random::even_constant(rng, ctx.m, bb);
    let beta: Vec<_> = (0..n).map(|_| random::odd_constant(rng, ctx.m)).collect();
    let h = ospgroup::affine(&a, &b, &beta)?;
    let q = act_all(&h, &p)?;
    let even = |t: &[SuperPoint<S>]| -> Result<Grassmann<S>> {
        let (t1, t2) = if (&t[1].x - &t[0].x).body().is_positive() { (&t[0], &t[1]) } else { (&t[1], &t[0]) };
        invariants::bracket(t1, &t[2])?.div(&invariants::bracket(t1, t2)?)
    };
    let d = &even(&p)? - &even(&q)?;
    Ok(zero_numbers([&d], ctx.tol, vec![pts_lit(&p), literal::format_matrix(&h)]))
}

/// A positive rational square `u²` with `u = p/q`.
fn square<S: Scalar>(rng: &mut SeededRng) -> S {
    let u: S = random::positive_rational(rng, 2);
    u.mul(&u)
}

/// Tuples whose brackets have square bodies where the normalizers take roots.
fn square_tuple<S: Scalar>(rng: &mut SeededRng, kind: Kind, n: usize, m: u8) -> Vec<SuperPoint<S>> {
    let s: S = random::small_rational(rng, 2);
    let u2: S = square(rng);
    let bodies: Vec<S> = match kind {
        Kind::Euclid => vec![s.clone(), s.add(&random::nonzero_rational(rng, 3))],
        Kind::Affine => {
            let x3 = loop {
                let x: S = random::small_rational(rng, 3);
                if !x.is_zero() && x != u2 {
                    break x;
                }
            };
            vec![s.clone(), s.add(&u2), s.add(&x3)]
        }
        Kind::Projective => {
            let q = rng.gen_range(1..=3i64);
            let p = q + rng.gen_range(1..=3i64);
            let v = S::from_ratio(p * p + q * q, 2 * p * q);
            let x3 = u2.mul(&v).mul(&v);
            let x4 = loop {
                let x: S = random::small_rational(rng, 4);
                if !x.is_zero() && x != u2 && x != x3 {
                    break x;
                }
            };
            vec![s.clone(), s.add(&u2), s.add(&x3), s.add(&x4)]
        }
    };
    // Souls are nilpotent, so only the bodies matter for the roots' existence.
    bodies.into_iter().map(|b| point(rng, n, m, b)).collect()
}

fn dual_path<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng, n: usize, kind: Kind) -> Result<Trial> {
    let pts = square_tuple::<S>(rng, kind, n, ctx.m);
    let a = invariants::constructive_invariant(kind, &pts)?;
    let b = invariants::closed_form_invariant(kind, &pts)?;
    let even = &a.even - &b.even;
    let (even_ok, even_r) = numbers_vanish([&even], ctx.tol);
    let odd_r = invariants::odd_discrepancy(&a, &b);
    let odd_ok = odd_r <= 1e-9;
    Ok(Trial::new(even_ok && odd_ok, even_r.max(odd_r), vec![pts_lit(&pts)]))
}

fn sorted_f64_points(rng: &mut SeededRng, m: u8, count: usize) -> Vec<SuperPoint<f64>> {
    let mut bodies: Vec<i64> = (-12..=12).collect();
    bodies.shuffle(rng);
    let mut b: Vec<i64> = bodies[..count].to_vec();
    b.sort_unstable();
    b.into_iter().map(|x| point(rng, 1, m, x as f64 / 2.0)).collect()
}

/// `J_p` from Euclidean invariants against its cyclic closed form (floating).
fn jp_dual(ctx: &Ctx, rng: &mut SeededRng) -> Result<Trial> {
    let p = sorted_f64_points(rng, ctx.m, 3);
    let (a, b) = invariants::proj_j(&p[0], &p[1], &p[2])?;
    let d = (&a - &b).max_abs();
    Ok(Trial::new(d <= 1e-9, d, vec![pts_lit(&p)]).note("floating backend"))
}

/// The odd projective invariant against its radical form (floating), where
/// the radicands are positive.
fn odd_radical(ctx: &Ctx, rng: &mut SeededRng) -> Result<Trial> {
    let p = sorted_f64_points(rng, ctx.m, 4);
    let a = invariants::proj_odd_invariant([&p[0], &p[1], &p[2], &p[3]])?;
    let b = invariants::proj_odd_invariant_radical([&p[0], &p[1], &p[2], &p[3]])?;
    let d = a.odd.iter().zip(&b).map(|(x, y)| (x - y).max_abs()).fold(0.0, f64::max);
    Ok(Trial::new(d <= 1e-9, d, vec![pts_lit(&p)]).note("floating backend"))
}

fn ord_parity<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng) -> Result<Trial> {
    let p = points::<S>(rng, 1, ctx.m, 3);
    let base = invariants::ord(&p[0], &p[1], &p[2])?;
    let perms: [([usize; 3], i32); 6] =
        [([0, 1, 2], 1), ([1, 2, 0], 1), ([2, 0, 1], 1), ([1, 0, 2], -1), ([0, 2, 1], -1), ([2, 1, 0], -1)];
    let mut ok = true;
    for (s, sign) in perms {
        ok &= invariants::ord(&p[s[0]], &p[s[1]], &p[s[2]])? == base * sign;
    }
    Ok(Trial::new(ok, if ok { 0.0 } else { 1.0 }, vec![pts_lit(&p)]))
}

// osp

fn osp_relations<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng, n: usize) -> Result<Trial> {
    let h = ospgroup::random_word::<S>(rng, n, ctx.m, 5)?;
    let r = h.validate();
    let ok = if S::EXACT { r.is_zero() } else { r.max_abs() <= ctx.tol };
    let ber = if n == 1 { (&h.berezinian()? - &Grassmann::one(ctx.m)).max_abs() } else { 0.0 };
    Ok(Trial::new(ok && ber <= ctx.tol, r.max_abs().max(ber), vec![literal::format_matrix(&h)]))
}

fn factorization<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng) -> Result<Trial> {
    let h = ospgroup::random_spo21::<S>(rng, ctx.m)?;
    let f = h.factorize()?;
    let p = f.product(ctx.m)?;
    let d: Vec<Grassmann<S>> = p.rows().iter().flatten().zip(h.rows().iter().flatten()).map(|(a, b)| a - b).collect();
    Ok(zero_numbers(&d, ctx.tol, vec![literal::format_matrix(&h)]))
}

fn action_homomorphism<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng, n: usize) -> Result<Trial> {
    let order = ctx.order.min(5);
    avoiding_poles(rng, |rng| {
        let h1 = ospgroup::random_word::<S>(rng, n, ctx.m, 2)?;
        let h2 = ospgroup::random_word::<S>(rng, n, ctx.m, 2)?;
        let base = S::from_ratio(1, 3);
        let inner = h2.action_germ(base.clone(), order, ctx.tol)?;
        let outer = h1.action_germ(inner.image_base().x.body(), order, ctx.tol)?;
        let direct = h1.checked_mul(&h2)?.action_germ(base, order, ctx.tol)?;
        let comp = outer.compose(&inner, ctx.tol)?;
        let mut d = vec![diff_jets(comp.phi(), direct.phi())?];
        for (a, b) in comp.psi().iter().zip(direct.psi()) {
            d.push(diff_jets(a, b)?);
        }
        Ok(zero_jets(&d, ctx.tol, vec![literal::format_matrix(&h1), literal::format_matrix(&h2)]))
    })
}

// cocycles

fn spo21_germ<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng) -> Result<(OspMatrix<S>, MapGerm<S>)> {
    avoiding_poles(rng, |rng| {
        let h = ospgroup::random_spo21::<S>(rng, ctx.m)?;
        let g = h.action_germ(S::zero(), ctx.order, ctx.tol)?;
        Ok((h, g))
    })
}

fn s1_kernel<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng) -> Result<Trial> {
    let (h, g) = spo21_germ::<S>(ctx, rng)?;
    let tol = ctx.tol * germ_scale(&[&g, &g]);
    let s = cocycles::schwarzian_s1(&g, tol)?;
    Ok(zero_jets([&s.coeff], tol, vec![literal::format_matrix(&h)]))
}

fn s2_kernel<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng) -> Result<Trial> {
    let (h, g) = contactmap::random_pc22::<S>(rng, ctx.m, S::zero(), ctx.order, 4, ctx.tol)?;
    let tol = ctx.tol * germ_scale(&[&g, &g]);
    let s = cocycles::schwarzian_s2(&g, tol)?;
    let q = cocycles::quad_s2(&g, tol)?;
    let mut res = vec![s.coeff];
    res.extend(q.components().map(|(_, c)| c.clone()));
    Ok(zero_jets(&res, tol, vec![literal::format_matrix(&h)]))
}

fn laws<S: Scalar>(ctx: &Ctx, phi: &MapGerm<S>, psi: &MapGerm<S>, which: &[Cocycle]) -> Result<Trial> {
    let tol = ctx.tol * germ_scale(&[phi, psi, phi, psi]);
    let res = cocycles::law_residuals(which, phi, psi, tol)?;
    Ok(zero_jets(&res, ctx.tol, vec![literal::format_germ(phi), literal::format_germ(psi)]))
}

fn law_k1<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng) -> Result<Trial> {
    let psi = k1(ctx, rng, S::zero())?;
    let phi = k1(ctx, rng, psi.image_base().x.body())?;
    use Cocycle::*;
    laws(ctx, &phi, &psi, &[Euclid, Affine, Schwarzian])
}

fn law_k1_extra<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng) -> Result<Trial> {
    let psi = k1(ctx, rng, S::zero())?;
    let phi = k1(ctx, rng, psi.image_base().x.body())?;
    laws(ctx, &phi, &psi, &[Cocycle::AffineProj, Cocycle::SchwarzianQuad])
}

fn law_k2<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng) -> Result<Trial> {
    let psi = contactmap::random_k2(rng, ctx.m, S::zero(), ctx.order, 2, ctx.tol)?;
    let phi = contactmap::random_k2(rng, ctx.m, psi.image_base().x.body(), ctx.order, 2, ctx.tol)?;
    use Cocycle::*;
    laws(ctx, &phi, &psi, &[Euclid, Affine, Schwarzian])
}

fn law_k2_extra<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng) -> Result<Trial> {
    let psi = contactmap::random_k2(rng, ctx.m, S::zero(), ctx.order, 2, ctx.tol)?;
    let phi = contactmap::random_k2(rng, ctx.m, psi.image_base().x.body(), ctx.order, 2, ctx.tol)?;
    laws(ctx, &phi, &psi, &[Cocycle::SchwarzianQuad])
}

fn s1_triple<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng) -> Result<Trial> {
    let g = k1(ctx, rng, S::zero())?;
    let tol = ctx.tol * germ_scale(&[&g, &g]);
    let f = cocycles::schwarzian_s1_forms(&g, tol)?;
    let res = [diff_jets(&f.from_e, &f.from_psi)?, diff_jets(&f.from_e, &f.from_root)?];
    Ok(zero_jets(&res, ctx.tol, vec![literal::format_germ(&g)]))
}

fn s2_dual<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng) -> Result<Trial> {
    let g = k2(ctx, rng, S::zero())?;
    let tol = ctx.tol * germ_scale(&[&g, &g]);
    let f = cocycles::schwarzian_s2_forms(&g, tol)?;
    let d = diff_jets(&f.from_e, &f.from_root)?;
    Ok(zero_jets([&d], ctx.tol, vec![literal::format_germ(&g)]))
}

fn cars<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng) -> Result<Trial> {
    let g = k1(ctx, rng, S::zero())?;
    let tol = ctx.tol * germ_scale(&[&g, &g]);
    let r = cocycles::cars_residual(&g, tol)?;
    Ok(zero_jets([&r], tol, vec![literal::format_germ(&g)]))
}

fn sections<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng) -> Result<Trial> {
    let base = random::small_rational::<S>(rng, 2);
    let g1 = cartan::random_jet(rng, 1, ctx.m, base.clone(), ctx.order, 4, true)?;
    let g3 = cartan::random_jet(rng, 1, ctx.m, base, ctx.order, 4, false)?;
    let half = Density::new(1, g1.clone());
    let three = Density::new(3, g3.clone());
    let r1 = diff_jets(&cocycles::project_oneform(&cocycles::section_half(&half)?)?.coeff, &g1)?;
    let back = cocycles::project_quad(&cocycles::section_three_halves(&three)?)?.coeff;
    let r3 = diff_jets(&back.scale(&S::from_ratio(2, 3)), &g3)?;
    Ok(zero_jets([&r1, &r3], ctx.tol, vec![literal::format_jet(&g1), literal::format_jet(&g3)]))
}

fn s2_relations<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng) -> Result<Trial> {
    let g = k2(ctx, rng, S::zero())?;
    let tol = ctx.tol * germ_scale(&[&g, &g]);
    let r = cocycles::s2_relations(&g, tol)?;
    Ok(zero_jets(&r, tol, vec![literal::format_germ(&g)]))
}

fn classical_reduction<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng) -> Result<Trial> {
    let g = k1(ctx, rng, S::zero())?;
    let tol = ctx.tol * germ_scale(&[&g, &g]);
    let red = cocycles::reduce_to_circle(&g, tol)?;
    let f = g.reduce_body();
    let f1 = f.dx();
    let log_f1 = cocycles::LogJet::of(&f1)?;
    let mut res = log_f1.residual(&red.euclid)?;
    res.push(diff_jets(&red.affine, &f1.dx().div(&f1)?)?);
    res.push(diff_jets(&red.projective.scale(&S::from_i64(6)), &cocycles::schwarzian_s0(&f)?)?);
    Ok(zero_jets(&res, tol, vec![literal::format_germ(&g)]))
}

// cartan

fn cartan_instance<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng, n: usize) -> Result<(MapGerm<S>, VectorField<S>, SuperPoint<S>)> {
    let base = S::zero();
    let g = germ_n(ctx, rng, n, base.clone())?;
    let x = cartan::random_field(rng, n, ctx.m, base.clone(), ctx.order)?;
    let t1 = point(rng, n, ctx.m, base);
    Ok((g, x, t1))
}

/// A seeded random `(Φ, X, t₁)` on S^{1|n} at base 0, as used by the Cartan checks.
pub fn random_cartan_instance<S: Scalar>(n: usize, order: i32, seed: u64) -> Result<(MapGerm<S>, VectorField<S>, SuperPoint<S>)> {
    let ctx = Ctx { m: m_for(Some(n)), order, tol: 1e-9 };
    cartan_instance(&ctx, &mut random::rng(seed), n)
}

fn comparison_trial<S: Scalar>(c: &EpsComparison<S>, ctx: &Ctx, inputs: Vec<String>) -> Trial {
    let r = c.max_residual();
    Trial::new(c.holds(ctx.tol), r, inputs)
}

fn instance_inputs<S: Scalar>(g: &MapGerm<S>, x: &VectorField<S>, t1: &SuperPoint<S>) -> Vec<String> {
    vec![literal::format_germ(g), literal::format_field(x), pts_lit(std::slice::from_ref(t1))]
}

fn cartan_projective<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng, n: usize) -> Result<Trial> {
    let (g, x, t1) = cartan_instance::<S>(ctx, rng, n)?;
    let c = cartan::cartan_projective(&g, &x, &t1, ctx.tol)?;
    Ok(comparison_trial(&c, ctx, instance_inputs(&g, &x, &t1)))
}

fn cartan_euclid<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng, n: usize) -> Result<Trial> {
    let (g, x, t1) = cartan_instance::<S>(ctx, rng, n)?;
    let c = cartan::cartan_euclid(&g, &x, &t1, ctx.tol)?;
    Ok(comparison_trial(&c, ctx, instance_inputs(&g, &x, &t1)))
}

fn cartan_affine<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng, n: usize) -> Result<Trial> {
    let (g, x, t1) = cartan_instance::<S>(ctx, rng, n)?;
    let c = cartan::cartan_affine(&g, &x, &t1, ctx.tol)?;
    Ok(comparison_trial(&c, ctx, instance_inputs(&g, &x, &t1)))
}

/// The worked example `x ↦ x²` at `1` with `X = ∂x`.
pub fn x_squared_example<S: Scalar>(tol: f64) -> Result<(EpsComparison<S>, S)> {
    let one = S::one();
    let f = SuperJet::from_h_poly(0, 0, one.clone(), 8, &[one.clone(), S::from_i64(2), one.clone()]);
    let s0 = cocycles::schwarzian_s0(&f)?.coeff(0, 0).body();
    let g = MapGerm::new(f, vec![])?.certify(tol)?;
    let x = VectorField::d_dx(0, 0, one.clone(), 8);
    let t1 = SuperPoint::new(Grassmann::one(0), vec![])?;
    Ok((cartan::cartan_projective(&g, &x, &t1, tol)?, s0))
}

fn x_squared<S: Scalar>(ctx: &Ctx, _rng: &mut SeededRng) -> Result<Trial> {
    let (c, s0) = x_squared_example::<S>(ctx.tol)?;
    let six_lhs = c.lhs[2].body().mul(&S::from_i64(6));
    let expect = S::from_ratio(-3, 2);
    let close = |a: &S| if S::EXACT { *a == expect } else { a.sub(&expect).abs_f64() <= ctx.tol };
    let ok = c.holds(ctx.tol) && close(&six_lhs) && close(&s0);
    let t = comparison_trial(&c, ctx, vec![]);
    Ok(Trial::new(ok, t.residual, vec![])
        .note(format!("6·LHS ε² = {}, S₀ = {}", six_lhs.to_literal(), s0.to_literal())))
}

fn first_order<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng, n: usize) -> Result<Trial> {
    let x = cartan::random_field::<S>(rng, n, ctx.m, S::zero(), ctx.order)?;
    let t1 = point(rng, n, ctx.m, S::zero());
    let mut res = cartan::discrete_variation_residuals(&x, &t1, ctx.tol)?;
    // The ε¹ term of the cross-ratio ratio vanishes for contact germs.
    let g = germ_n(ctx, rng, n, S::zero())?;
    let c = cartan::cartan_projective(&g, &x, &t1, ctx.tol)?;
    res.push(c.lhs[1].clone());
    Ok(zero_numbers(&res, ctx.tol, vec![literal::format_field(&x), pts_lit(std::slice::from_ref(&t1))]))
}

fn lie_vs_group<S: Scalar>(ctx: &Ctx, rng: &mut SeededRng) -> Result<Trial> {
    let m = ctx.m;
    let eps = Grassmann::generator(m, m as usize - 2)?.checked_mul(&Grassmann::generator(m, m as usize - 1)?)?;
    let f = cartan::random_jet::<S>(rng, 1, m - 2, S::zero(), ctx.order + 2, 4, false)?.with_generators(m)?;
    let mut res = Vec::new();
    for i in [0, 1, 3] {
        res.push(cartan::lie_vs_group(&f, i, &eps, ctx.tol)?);
    }
    Ok(zero_jets(&res, ctx.tol, vec![literal::format_jet(&f)]))
}

/// The cubic obstruction of the N = 3 witness with `λ = θ₁`.
pub fn n3_witness_obstruction<S: Scalar>(tol: f64) -> Result<cartan::CubicObstruction<S>> {
    let lambda = Grassmann::generator(2, 0)?;
    let w = cartan::n3_witness(S::zero(), 4, &lambda, tol)?;
    cartan::cubic_obstruction(&w)
}

fn n3_obstruction<S: Scalar>(ctx: &Ctx, _rng: &mut SeededRng) -> Result<Trial> {
    let c = n3_witness_obstruction::<S>(ctx.tol)?;
    let mag = c.antisymmetrized.max_abs();
    let nonzero = if S::EXACT { !c.antisymmetrized.is_zero() } else { mag > ctx.tol };
    Ok(Trial::new(nonzero, mag, vec![]).note(format!(
        "T₁₂₃ = {}, antisymmetrized = {}",
        literal::format_jet(&c.ordered),
        literal::format_jet(&c.antisymmetrized)
    )))
}
