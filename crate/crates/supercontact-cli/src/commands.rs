use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use supercontact::cartan::{self, EpsComparison, VectorField};
use supercontact::cocycles;
use supercontact::invariants::{self, Ambiguity, InvariantValue};
use supercontact::literal;
use supercontact::random;
use supercontact::verify::{self, Report, Suite, VerifyConfig};
use supercontact::{Grassmann, MapGerm, Rational, Scalar, SuperJet, SuperPoint};

use crate::builtin;
use crate::{Backend, CartanArgs, CartanKind, EvalArgs, EvalWhat, Failure, Format, ReportArgs, VerifyArgs, Which};

pub type Outcome = Result<String, Failure>;

fn input(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn required<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, Failure> {
    p.as_deref().ok_or_else(|| Failure::Input(format!("--{flag} FILE is required")))
}

/// Parses a file, prefixing errors with its path.
fn load<T>(path: &Path, parse: impl FnOnce(&str) -> supercontact::Result<T>) -> Result<T, Failure> {
    parse(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(Failure::Input(format!("--tol must be a non-negative number, got {tol}")))
    }
}

fn check_order(k: i32) -> Result<(), Failure> {
    if (1..=32).contains(&k) {
        Ok(())
    } else {
        Err(Failure::Input(format!("--jet-order must lie in 1..=32, got {k}")))
    }
}

fn to_json(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn lit_value(text: String) -> Value {
    serde_json::from_str(&text).expect("literals are JSON")
}

// verify

pub fn verify(a: &VerifyArgs) -> Outcome {
    let suites = Suite::parse(&a.suite).ok_or_else(|| {
        Failure::Input(format!("unknown suite {:?} (expected algebra, invariants, osp, cocycles, cartan or all)", a.suite))
    })?;
    check_tol(a.tol)?;
    check_order(a.jet_order)?;
    if a.trials == Some(0) {
        return Err(Failure::Input("--trials must be positive".into()));
    }
    let cfg = VerifyConfig {
        suites,
        n: a.n,
        order: a.jet_order,
        tol: a.tol,
        seed: a.seed,
        trials: a.trials,
        only: a.only.clone(),
    };
    let report = match a.field {
        Backend::Rational => verify::run::<Rational>(&cfg),
        Backend::F64 => verify::run::<f64>(&cfg),
    };
    if let Some(out) = &a.out {
        fs::write(out, to_json(&report)).map_err(|e| Failure::Input(format!("{}: {e}", out.display())))?;
    }
    let text = match a.format {
        Format::Json => to_json(&report),
        Format::Text => render_report(&report),
    };
    if report.passed() {
        Ok(text)
    } else {
        Err(Failure::Check(text))
    }
}

fn render_report(r: &Report) -> String {
    let mut s = String::new();
    for c in &r.results {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        let _ = write!(
            s,
            "{mark} {:<38} trials={:<4} failures={:<3} max_residual={:.3e}",
            c.id, c.trials, c.failures, c.max_residual
        );
        if let Some(n) = &c.note {
            let _ = write!(s, "  [{n}]");
        }
        s.push('\n');
        if let Some(f) = &c.first_failure {
            let _ = writeln!(s, "     first failure: trial {} ({})", f.trial, f.reason);
            for i in &f.inputs {
                let _ = writeln!(s, "       input {i}");
            }
        }
    }
    let passed = r.results.iter().filter(|c| c.passed).count();
    let _ = writeln!(s, "{passed}/{} checks passed ({} backend, seed {})", r.results.len(), r.backend, r.config.seed);
    s
}

// report

pub fn report(a: &ReportArgs) -> Outcome {
    let text = read(&a.input)?;
    let report: Report = serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("{}: line {} column {}: {e}", a.input.display(), e.line(), e.column())))?;
    let summary = verify::summarize(&report);
    let failing: Vec<_> = report.results.iter().filter(|r| !r.passed).collect();
    match a.format {
        Format::Json => Ok(to_json(&json!({ "summary": summary, "failures": failing }))),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "backend {}, seed {}", summary.backend, summary.seed);
            for su in &summary.suites {
                let _ = writeln!(
                    s,
                    "{:<11} checks={:<3} passed={:<3} failed={:<3} trials={:<5} max_residual={:.3e}",
                    su.suite.name(),
                    su.checks,
                    su.passed,
                    su.failed,
                    su.trials,
                    su.max_residual
                );
            }
            for f in failing {
                let _ = writeln!(s, "failed {} (seed {})", f.id, f.seed);
                if let Some(ff) = &f.first_failure {
                    let _ = writeln!(s, "  trial {}: {}", ff.trial, ff.reason);
                    for i in &ff.inputs {
                        let _ = writeln!(s, "  input {i}");
                    }
                }
            }
            Ok(s)
        }
    }
}

// eval

pub fn eval(a: &EvalArgs) -> Outcome {
    check_tol(a.tol)?;
    check_order(a.jet_order)?;
    match a.field {
        Backend::Rational => match eval_with::<Rational>(a) {
            Err(Failure::Input(msg)) if msg.ends_with(NOT_SQUARE) && matches!(a.what, EvalWhat::Affine | EvalWhat::OddProj) => {
                let text = eval_with::<f64>(a)?;
                Ok(match a.format {
                    Format::Text => format!("{text}(floating backend: a bracket body is not a rational square)\n"),
                    Format::Json => text,
                })
            }
            other => other,
        },
        Backend::F64 => eval_with::<f64>(a),
    }
}

/// Tail of the scalar error raised by rational square roots of non-squares.
const NOT_SQUARE: &str = "use the f64 backend";

fn check_n(expected: Option<usize>, got: usize, what: &str) -> Result<(), Failure> {
    match expected {
        Some(n) if n != got => Err(Failure::Input(format!("--n {n} does not match the {what}'s N = {got}"))),
        _ => Ok(()),
    }
}

fn ambiguity_name(a: Ambiguity) -> &'static str {
    match a {
        Ambiguity::Exact => "exact",
        Ambiguity::Sign => "up to sign",
        Ambiguity::Orthogonal => "up to O(N)",
    }
}

fn show_invariant<S: Scalar>(v: &InvariantValue<S>, format: Format) -> String {
    match format {
        Format::Json => to_json(&json!({
            "even": literal::grassmann_to_lit(&v.even),
            "odd": v.odd.iter().map(literal::grassmann_to_lit).collect::<Vec<_>>(),
            "ambiguity": ambiguity_name(v.ambiguity),
        })),
        Format::Text => {
            let mut s = format!("even = {}\n", v.even);
            for (i, o) in v.odd.iter().enumerate() {
                let _ = writeln!(s, "odd[{}] = {o}", i + 1);
            }
            if v.ambiguity != Ambiguity::Exact {
                let _ = writeln!(s, "odd part determined {}", ambiguity_name(v.ambiguity));
            }
            s
        }
    }
}

fn show_grassmann<S: Scalar>(g: &Grassmann<S>, format: Format) -> String {
    match format {
        Format::Json => to_json(&json!({ "value": literal::grassmann_to_lit(g) })),
        Format::Text => format!("{g}\n"),
    }
}

/// Named jets: literal lines in text mode, one object in JSON mode.
fn show_jets<S: Scalar>(items: &[(String, &SuperJet<S>)], extra: &[(&str, Value)], format: Format) -> String {
    match format {
        Format::Json => {
            let mut obj = serde_json::Map::new();
            for (k, v) in extra {
                obj.insert((*k).to_string(), v.clone());
            }
            for (k, j) in items {
                obj.insert(k.clone(), serde_json::to_value(literal::jet_to_lit(*j)).expect("serializable"));
            }
            to_json(&Value::Object(obj))
        }
        Format::Text => {
            let mut s = String::new();
            for (k, v) in extra {
                let _ = writeln!(s, "{k} = {}", v.as_str().map_or(v.to_string(), str::to_string));
            }
            for (k, j) in items {
                let _ = writeln!(s, "{k} = {}", literal::format_jet(*j));
            }
            s
        }
    }
}

fn weight(twice: i64) -> String {
    if twice % 2 == 0 {
        (twice / 2).to_string()
    } else {
        format!("{twice}/2")
    }
}

fn eval_with<S: Scalar>(a: &EvalArgs) -> Outcome {
    let lib = |e: supercontact::Error| input(e);
    match a.what {
        EvalWhat::Euclid | EvalWhat::Affine | EvalWhat::CrossRatio | EvalWhat::OddProj => {
            let path = required(&a.points, "points")?;
            let pts = load(path, literal::parse_points::<S>)?;
            let need = match a.what {
                EvalWhat::Euclid => 2,
                EvalWhat::Affine => 3,
                _ => 4,
            };
            if pts.len() != need {
                return Err(Failure::Input(format!("{}: expected {need} points, found {}", path.display(), pts.len())));
            }
            check_n(a.n, pts[0].n(), "points")?;
            Ok(match a.what {
                EvalWhat::Euclid => show_invariant(&invariants::euclid_invariant(&pts[0], &pts[1]).map_err(lib)?, a.format),
                EvalWhat::Affine => show_invariant(&invariants::affine_invariant(&pts[0], &pts[1], &pts[2]).map_err(lib)?, a.format),
                EvalWhat::CrossRatio => {
                    show_grassmann(&invariants::cross_ratio([&pts[0], &pts[1], &pts[2], &pts[3]]).map_err(lib)?, a.format)
                }
                _ => show_invariant(&invariants::proj_odd_invariant([&pts[0], &pts[1], &pts[2], &pts[3]]).map_err(lib)?, a.format),
            })
        }
        EvalWhat::Cocycle => {
            let which = a.which.ok_or_else(|| Failure::Input("--which E|A|S is required".into()))?;
            let germ = load(required(&a.map, "map")?, |t| literal::parse_germ::<S>(t, a.tol))?;
            check_n(a.n, germ.n(), "germ")?;
            match which {
                Which::E => {
                    let e = germ.multiplier(a.tol).map_err(lib)?;
                    let l = cocycles::log_multiplier(&germ, a.tol).map_err(lib)?;
                    let body = json!(format!("log({})", l.body.to_literal()));
                    Ok(show_jets(&[("multiplier".into(), &e), ("log_rest".into(), &l.rest)], &[("log_body", body)], a.format))
                }
                Which::A => {
                    let w = cocycles::cocycle_a(&germ, a.tol).map_err(lib)?;
                    let mut items = vec![("alpha".to_string(), &w.alpha)];
                    items.extend(w.beta.iter().enumerate().map(|(i, b)| (format!("beta{}", i + 1), b)));
                    Ok(show_jets(&items, &[], a.format))
                }
                Which::S if germ.n() == 0 => {
                    let s0 = cocycles::schwarzian_s0(germ.phi()).map_err(lib)?;
                    Ok(show_jets(&[("S0".into(), &s0)], &[("weight", json!("2"))], a.format))
                }
                Which::S => {
                    let s = cocycles::schwarzian(&germ, a.tol).map_err(lib)?;
                    Ok(show_jets(&[("S".into(), &s.coeff)], &[("weight", json!(weight(s.twice_weight)))], a.format))
                }
            }
        }
        EvalWhat::Germ => {
            let germ = load(required(&a.map, "map")?, |t| literal::parse_germ::<S>(t, a.tol))?;
            check_n(a.n, germ.n(), "germ")?;
            let e = germ.multiplier(a.tol).map_err(lib)?;
            let r = germ.max_residual().map_err(lib)?;
            let img = literal::format_points(std::slice::from_ref(&germ.image_base()));
            Ok(show_jets(
                &[("multiplier".into(), &e)],
                &[("contact_residual", json!(format!("{r:e}"))), ("image_base", lit_value(img))],
                a.format,
            ))
        }
        EvalWhat::Matrix => {
            let mat = load(required(&a.matrix, "matrix")?, |t| literal::parse_matrix::<S>(t, a.tol))?;
            check_n(a.n, mat.n(), "matrix")?;
            let r = mat.validate().max_abs();
            let mut extra = vec![("relation_residual", json!(format!("{r:e}")))];
            if mat.n() == 1 {
                let ber = mat.berezinian().map_err(lib)?;
                extra.push(("berezinian", lit_value(literal::format_grassmann(&ber))));
            }
            let germ = mat.action_germ(S::zero(), a.jet_order, a.tol).map_err(lib)?;
            let mut items = vec![("phi".to_string(), germ.phi())];
            items.extend(germ.psi().iter().enumerate().map(|(i, p)| (format!("psi{}", i + 1), p)));
            Ok(show_jets(&items, &extra, a.format))
        }
    }
}

// cartan

pub fn cartan(a: &CartanArgs) -> Outcome {
    check_tol(a.tol)?;
    check_order(a.jet_order)?;
    if a.n > 2 {
        return Err(Failure::Input(format!("the projective comparison is defined for N = 0, 1, 2, not {}", a.n)));
    }
    match a.backend {
        Backend::Rational => cartan_with::<Rational>(a),
        Backend::F64 => cartan_with::<f64>(a),
    }
}

type Instance<S> = (MapGerm<S>, VectorField<S>, SuperPoint<S>);

fn instance<S: Scalar>(a: &CartanArgs) -> Result<Instance<S>, Failure> {
    let random = || verify::random_cartan_instance::<S>(a.n, a.jet_order, a.seed).map_err(input);
    let (germ, rand_field, rand_point) = match &a.map {
        Some(p) => {
            let g = load(p, |t| literal::parse_germ::<S>(t, a.tol))?;
            if g.n() != a.n {
                return Err(Failure::Input(format!("{}: germ has N = {}, but --n {}", p.display(), g.n(), a.n)));
            }
            (g, None, None)
        }
        None => {
            let (g, x, t) = random()?;
            (g, Some(x), Some(t))
        }
    };
    let (n, m, base) = (germ.n(), germ.m(), germ.base().clone());
    let field = match a.field.as_deref() {
        Some(spec) => match spec.strip_prefix("builtin:") {
            Some(b) => builtin::field(b, n, m, base.clone(), a.jet_order).map_err(input)?,
            None => load(Path::new(spec), literal::parse_field::<S>)?,
        },
        None => match rand_field {
            Some(x) => x,
            None => {
                let mut rng = random::rng(a.seed);
                cartan::random_field(&mut rng, n, m, base.clone(), a.jet_order).map_err(input)?
            }
        },
    };
    let point = match &a.point {
        Some(p) => {
            let pts = load(p, literal::parse_points::<S>)?;
            pts.into_iter().next().ok_or_else(|| Failure::Input(format!("{}: no points", p.display())))?
        }
        None => match rand_point {
            Some(t) => t,
            None => SuperPoint::new(Grassmann::scalar(m, base), vec![Grassmann::zero(m); n]).map_err(input)?,
        },
    };
    Ok((germ, field, point))
}

fn cartan_with<S: Scalar>(a: &CartanArgs) -> Outcome {
    let (germ, field, t1) = instance::<S>(a)?;
    let c = match a.kind {
        CartanKind::Euclid => cartan::cartan_euclid(&germ, &field, &t1, a.tol),
        CartanKind::Affine => cartan::cartan_affine(&germ, &field, &t1, a.tol),
        CartanKind::Projective => cartan::cartan_projective(&germ, &field, &t1, a.tol),
    }
    .map_err(input)?;
    let ok = c.holds(a.tol);
    let mut text = render_comparison(&c, a, ok);
    if a.n == 0 && a.kind == CartanKind::Projective && a.format == Format::Text {
        let s0 = cocycles::schwarzian_s0(germ.phi()).map_err(input)?.eval(&t1.x, &t1.xi, a.tol).map_err(input)?;
        let _ = writeln!(text, "S0(t1) = {s0} (the eps^2 term is S0/6)");
    }
    if ok {
        Ok(text)
    } else {
        Err(Failure::Check(text))
    }
}

/// The ε⁰…ε³ coefficients printed per side.
const SHOWN: usize = 4;

fn render_comparison<S: Scalar>(c: &EpsComparison<S>, a: &CartanArgs, ok: bool) -> String {
    let kind = match a.kind {
        CartanKind::Euclid => "euclid",
        CartanKind::Affine => "affine",
        CartanKind::Projective => "projective",
    };
    match a.format {
        Format::Json => {
            let side = |v: &[Grassmann<S>]| -> Vec<Value> {
                (0..SHOWN)
                    .map(|k| v.get(k).map_or(Value::Null, |g| serde_json::to_value(literal::grassmann_to_lit(g)).expect("serializable")))
                    .collect()
            };
            to_json(&json!({
                "kind": kind,
                "N": a.n,
                "compared": c.compared(),
                "lhs": side(&c.lhs),
                "rhs": side(&c.rhs),
                "max_residual": c.max_residual(),
                "match": ok,
            }))
        }
        Format::Text => {
            let mut s = format!("{kind} expansion, N = {}, compared through eps^{}\n", a.n, c.compared().saturating_sub(1));
            for k in 0..SHOWN {
                let l = c.lhs.get(k).map_or("-".to_string(), ToString::to_string);
                let r = c.rhs.get(k).map_or("(not compared)".to_string(), ToString::to_string);
                let _ = writeln!(s, "eps^{k}: lhs = {l}");
                let _ = writeln!(s, "       rhs = {r}");
            }
            let _ = writeln!(s, "{} (max residual {:e})", if ok { "match" } else { "MISMATCH" }, c.max_residual());
            s
        }
    }
}
