//! The JSON literal format for Grassmann numbers, points, jets, germs,
//! matrices and vector fields.
//!
//! A Grassmann number is a list of `{"mask": [i, …], "value": "p/q"}` records
//! with 1-based ascending generator indices; the empty mask is the body.
//! Every document carries an optional `"M"`, the number of generators; when
//! absent it is the largest index used.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cartan::VectorField;
use crate::contactmap::{MapGerm, SuperPoint};
use crate::error::{Error, Result};
use crate::grassmann::{Grassmann, MAX_GENERATORS};
use crate::ospgroup::OspMatrix;
use crate::scalar::Scalar;
use crate::superjet::SuperJet;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermLit {
    pub mask: Vec<usize>,
    pub value: Value,
}

pub type GrassmannLit = Vec<TermLit>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JetTermLit {
    pub xi_mask: Vec<usize>,
    pub h_power: usize,
    pub value: GrassmannLit,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JetLit {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u8>,
    pub base_x: Value,
    #[serde(rename = "K")]
    pub k: i32,
    pub terms: Vec<JetTermLit>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointLit {
    pub x: GrassmannLit,
    #[serde(default)]
    pub xi: Vec<GrassmannLit>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsLit {
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u8>,
    pub points: Vec<PointLit>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GermLit {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u8>,
    pub base_x: Value,
    #[serde(rename = "K")]
    pub k: i32,
    pub phi: Vec<JetTermLit>,
    #[serde(default)]
    pub psi: Vec<Vec<JetTermLit>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldLit {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u8>,
    pub base_x: Value,
    #[serde(rename = "K")]
    pub k: i32,
    pub a: Vec<JetTermLit>,
    #[serde(default)]
    pub g: Vec<Vec<JetTermLit>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixLit {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u8>,
    pub a: GrassmannLit,
    pub b: GrassmannLit,
    pub c: GrassmannLit,
    pub d: GrassmannLit,
    #[serde(default)]
    pub alpha: Vec<GrassmannLit>,
    #[serde(default)]
    pub beta: Vec<GrassmannLit>,
    #[serde(default)]
    pub gamma: Vec<GrassmannLit>,
    #[serde(default)]
    pub delta: Vec<GrassmannLit>,
    #[serde(default)]
    pub e: Vec<Vec<GrassmannLit>>,
}

fn at(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{path}: {msg}"))
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))
}

fn scalar<S: Scalar>(v: &Value, path: &str) -> Result<S> {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(at(path, "expected a number or a \"p/q\" string")),
    };
    S::parse_literal(&s).map_err(|e| at(path, e))
}

fn mask_of(indices: &[usize], path: &str, limit: usize) -> Result<u32> {
    let mut mask = 0u32;
    let mut prev = 0;
    for &i in indices {
        if i == 0 || i > limit {
            return Err(at(path, format!("index {i} outside 1..={limit}")));
        }
        if i <= prev {
            return Err(at(path, "indices must be strictly ascending"));
        }
        prev = i;
        mask |= 1 << (i - 1);
    }
    Ok(mask)
}

fn indices_of(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

fn grassmann_max_index(g: &GrassmannLit) -> usize {
    g.iter().flat_map(|t| t.mask.iter().copied()).max().unwrap_or(0)
}

fn jet_max_index(terms: &[JetTermLit]) -> usize {
    terms.iter().map(|t| grassmann_max_index(&t.value)).max().unwrap_or(0)
}

fn resolve_m(declared: Option<u8>, used: usize) -> Result<u8> {
    match declared {
        Some(m) if (m as usize) < used => Err(at("M", format!("declares {m} generators but index {used} is used"))),
        Some(m) if m as usize > MAX_GENERATORS => Err(at("M", format!("at most {MAX_GENERATORS} generators"))),
        Some(m) => Ok(m),
        None if used > MAX_GENERATORS => Err(at("M", format!("index {used} exceeds {MAX_GENERATORS} generators"))),
        None => Ok(used as u8),
    }
}

pub fn grassmann_from_lit<S: Scalar>(lit: &GrassmannLit, m: u8, path: &str) -> Result<Grassmann<S>> {
    let mut terms = Vec::with_capacity(lit.len());
    for (k, t) in lit.iter().enumerate() {
        let p = format!("{path}[{k}]");
        let mask = mask_of(&t.mask, &format!("{p}.mask"), m as usize)?;
        terms.push((mask, scalar(&t.value, &format!("{p}.value"))?));
    }
    Grassmann::from_terms(m, terms).map_err(|e| at(path, e))
}

pub fn grassmann_to_lit<S: Scalar>(g: &Grassmann<S>) -> GrassmannLit {
    g.terms()
        .iter()
        .map(|(mask, c)| TermLit { mask: indices_of(*mask), value: Value::String(c.to_literal()) })
        .collect()
}

/// Parses a standalone Grassmann number; `m` defaults to the largest index used.
pub fn parse_grassmann<S: Scalar>(text: &str, m: Option<u8>) -> Result<Grassmann<S>> {
    let lit: GrassmannLit = parse_json(text)?;
    let m = resolve_m(m, grassmann_max_index(&lit))?;
    grassmann_from_lit(&lit, m, "$")
}

pub fn format_grassmann<S: Scalar>(g: &Grassmann<S>) -> String {
    serde_json::to_string(&grassmann_to_lit(g)).expect("literals serialize")
}

/// Largest jet order accepted from text.
pub const MAX_ORDER: i32 = 64;

fn jet_from_terms<S: Scalar>(n: usize, m: u8, base: &S, k: i32, terms: &[JetTermLit], path: &str) -> Result<SuperJet<S>> {
    if !(0..=MAX_ORDER).contains(&k) {
        return Err(at("K", format!("jet order {k} outside 0..={MAX_ORDER}")));
    }
    let mut out = Vec::with_capacity(terms.len());
    for (i, t) in terms.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let mask = mask_of(&t.xi_mask, &format!("{p}.xi_mask"), n)?;
        if t.h_power > k as usize {
            return Err(at(&format!("{p}.h_power"), format!("power {} exceeds K = {k}", t.h_power)));
        }
        out.push((mask, t.h_power, grassmann_from_lit(&t.value, m, &format!("{p}.value"))?));
    }
    SuperJet::from_terms(n, m, base.clone(), k, out).map_err(|e| at(path, e))
}

fn jet_terms_to_lit<S: Scalar>(f: &SuperJet<S>) -> Vec<JetTermLit> {
    f.terms()
        .map(|(mask, j, c)| JetTermLit { xi_mask: indices_of(mask), h_power: j, value: grassmann_to_lit(c) })
        .collect()
}

fn check_n(n: usize) -> Result<()> {
    if n > crate::superjet::MAX_ODD {
        return Err(at("N", format!("at most {} odd variables", crate::superjet::MAX_ODD)));
    }
    Ok(())
}

pub fn parse_jet<S: Scalar>(text: &str) -> Result<SuperJet<S>> {
    let lit: JetLit = parse_json(text)?;
    check_n(lit.n)?;
    let m = resolve_m(lit.m, jet_max_index(&lit.terms))?;
    let base = scalar(&lit.base_x, "base_x")?;
    jet_from_terms(lit.n, m, &base, lit.k, &lit.terms, "terms")
}

pub fn jet_to_lit<S: Scalar>(f: &SuperJet<S>) -> JetLit {
    JetLit {
        n: f.n(),
        m: Some(f.m()),
        base_x: Value::String(f.base().to_literal()),
        k: f.order(),
        terms: jet_terms_to_lit(f),
    }
}

pub fn format_jet<S: Scalar>(f: &SuperJet<S>) -> String {
    serde_json::to_string(&jet_to_lit(f)).expect("literals serialize")
}

pub fn point_from_lit<S: Scalar>(lit: &PointLit, m: u8, path: &str) -> Result<SuperPoint<S>> {
    let x = grassmann_from_lit(&lit.x, m, &format!("{path}.x"))?;
    let xi = lit
        .xi
        .iter()
        .enumerate()
        .map(|(i, g)| grassmann_from_lit(g, m, &format!("{path}.xi[{i}]")))
        .collect::<Result<_>>()?;
    SuperPoint::new(x, xi).map_err(|e| at(path, e))
}

pub fn point_to_lit<S: Scalar>(p: &SuperPoint<S>) -> PointLit {
    PointLit { x: grassmann_to_lit(&p.x), xi: p.xi.iter().map(grassmann_to_lit).collect() }
}

/// Parses a list of points sharing one odd dimension and one algebra.
pub fn parse_points<S: Scalar>(text: &str) -> Result<Vec<SuperPoint<S>>> {
    let lit: PointsLit = parse_json(text)?;
    let used = lit
        .points
        .iter()
        .flat_map(|p| std::iter::once(&p.x).chain(p.xi.iter()))
        .map(grassmann_max_index)
        .max()
        .unwrap_or(0);
    let m = resolve_m(lit.m, used)?;
    let pts: Vec<SuperPoint<S>> = lit
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| point_from_lit(p, m, &format!("points[{i}]")))
        .collect::<Result<_>>()?;
    if let Some(p) = pts.first() {
        let n = p.n();
        check_n(n)?;
        if let Some(i) = pts.iter().position(|q| q.n() != n) {
            return Err(at(&format!("points[{i}].xi"), format!("expected {n} odd coordinates")));
        }
    }
    Ok(pts)
}

pub fn format_points<S: Scalar>(pts: &[SuperPoint<S>]) -> String {
    let lit = PointsLit { m: pts.first().map(SuperPoint::m), points: pts.iter().map(point_to_lit).collect() };
    serde_json::to_string(&lit).expect("literals serialize")
}

/// A germ as written, before contact certification.
pub fn parse_germ_uncertified<S: Scalar>(text: &str) -> Result<MapGerm<S>> {
    let lit: GermLit = parse_json(text)?;
    check_n(lit.n)?;
    if lit.psi.len() != lit.n {
        return Err(at("psi", format!("expected {} odd components, got {}", lit.n, lit.psi.len())));
    }
    let used = lit.psi.iter().map(|p| jet_max_index(p)).fold(jet_max_index(&lit.phi), usize::max);
    let m = resolve_m(lit.m, used)?;
    let base = scalar(&lit.base_x, "base_x")?;
    let phi = jet_from_terms(lit.n, m, &base, lit.k, &lit.phi, "phi")?;
    let psi = lit
        .psi
        .iter()
        .enumerate()
        .map(|(i, p)| jet_from_terms(lit.n, m, &base, lit.k, p, &format!("psi[{i}]")))
        .collect::<Result<_>>()?;
    MapGerm::new(phi, psi)
}

/// Parses a germ and certifies its contact residuals (exactly in rational
/// mode, within `tol` otherwise).
pub fn parse_germ<S: Scalar>(text: &str, tol: f64) -> Result<MapGerm<S>> {
    parse_germ_uncertified(text)?.certify(tol)
}

pub fn germ_to_lit<S: Scalar>(g: &MapGerm<S>) -> GermLit {
    GermLit {
        n: g.n(),
        m: Some(g.m()),
        base_x: Value::String(g.base().to_literal()),
        k: g.order(),
        phi: jet_terms_to_lit(g.phi()),
        psi: g.psi().iter().map(jet_terms_to_lit).collect(),
    }
}

pub fn format_germ<S: Scalar>(g: &MapGerm<S>) -> String {
    serde_json::to_string(&germ_to_lit(g)).expect("literals serialize")
}

pub fn parse_field<S: Scalar>(text: &str) -> Result<VectorField<S>> {
    let lit: FieldLit = parse_json(text)?;
    check_n(lit.n)?;
    if lit.g.len() != lit.n {
        return Err(at("g", format!("expected {} odd components, got {}", lit.n, lit.g.len())));
    }
    let used = lit.g.iter().map(|p| jet_max_index(p)).fold(jet_max_index(&lit.a), usize::max);
    let m = resolve_m(lit.m, used)?;
    let base = scalar(&lit.base_x, "base_x")?;
    let a = jet_from_terms(lit.n, m, &base, lit.k, &lit.a, "a")?;
    let g = lit
        .g
        .iter()
        .enumerate()
        .map(|(i, p)| jet_from_terms(lit.n, m, &base, lit.k, p, &format!("g[{i}]")))
        .collect::<Result<_>>()?;
    VectorField::new(a, g).map_err(|e| at("$", e))
}

pub fn field_to_lit<S: Scalar>(x: &VectorField<S>) -> FieldLit {
    FieldLit {
        n: x.n(),
        m: Some(x.m()),
        base_x: Value::String(x.base().to_literal()),
        k: x.a.order(),
        a: jet_terms_to_lit(&x.a),
        g: x.g.iter().map(jet_terms_to_lit).collect(),
    }
}

pub fn format_field<S: Scalar>(x: &VectorField<S>) -> String {
    serde_json::to_string(&field_to_lit(x)).expect("literals serialize")
}

/// A matrix as written, before validation of the group relations.
pub fn parse_matrix_unchecked<S: Scalar>(text: &str) -> Result<OspMatrix<S>> {
    let lit: MatrixLit = parse_json(text)?;
    check_n(lit.n)?;
    let n = lit.n;
    for (name, len) in [("alpha", lit.alpha.len()), ("beta", lit.beta.len()), ("gamma", lit.gamma.len()), ("delta", lit.delta.len()), ("e", lit.e.len())] {
        if len != n {
            return Err(at(name, format!("expected {n} entries, got {len}")));
        }
    }
    if let Some(i) = lit.e.iter().position(|r| r.len() != n) {
        return Err(at(&format!("e[{i}]"), format!("expected {n} entries")));
    }
    let used = [&lit.a, &lit.b, &lit.c, &lit.d]
        .into_iter()
        .chain(lit.alpha.iter())
        .chain(lit.beta.iter())
        .chain(lit.gamma.iter())
        .chain(lit.delta.iter())
        .chain(lit.e.iter().flatten())
        .map(grassmann_max_index)
        .max()
        .unwrap_or(0);
    let m = resolve_m(lit.m, used)?;
    let one = |g: &GrassmannLit, p: &str| grassmann_from_lit::<S>(g, m, p);
    let list = |v: &[GrassmannLit], name: &str| -> Result<Vec<Grassmann<S>>> {
        v.iter().enumerate().map(|(i, g)| one(g, &format!("{name}[{i}]"))).collect()
    };
    let e = lit
        .e
        .iter()
        .enumerate()
        .map(|(i, r)| list(r, &format!("e[{i}]")))
        .collect::<Result<_>>()?;
    OspMatrix::from_blocks(
        one(&lit.a, "a")?,
        one(&lit.b, "b")?,
        one(&lit.c, "c")?,
        one(&lit.d, "d")?,
        list(&lit.alpha, "alpha")?,
        list(&lit.beta, "beta")?,
        list(&lit.gamma, "gamma")?,
        list(&lit.delta, "delta")?,
        e,
    )
    .map_err(|e| at("$", e))
}

/// Parses a matrix and checks the SpO(2|N) relations (exactly in rational
/// mode, within `tol` otherwise).
pub fn parse_matrix<S: Scalar>(text: &str, tol: f64) -> Result<OspMatrix<S>> {
    let mat = parse_matrix_unchecked::<S>(text)?;
    let r = mat.validate();
    let ok = if S::EXACT { r.is_zero() } else { r.max_abs() <= tol };
    if !ok {
        return Err(Error::Precondition(format!("matrix violates the SpO(2|N) relations (max residual {:e})", r.max_abs())));
    }
    Ok(mat)
}

pub fn matrix_to_lit<S: Scalar>(mat: &OspMatrix<S>) -> MatrixLit {
    let n = mat.n();
    MatrixLit {
        n,
        m: Some(mat.m()),
        a: grassmann_to_lit(mat.a()),
        b: grassmann_to_lit(mat.b()),
        c: grassmann_to_lit(mat.c()),
        d: grassmann_to_lit(mat.d()),
        alpha: (0..n).map(|k| grassmann_to_lit(mat.alpha(k))).collect(),
        beta: (0..n).map(|k| grassmann_to_lit(mat.beta(k))).collect(),
        gamma: (0..n).map(|k| grassmann_to_lit(mat.gamma(k))).collect(),
        delta: (0..n).map(|k| grassmann_to_lit(mat.delta(k))).collect(),
        e: (0..n).map(|i| (0..n).map(|j| grassmann_to_lit(mat.e(i, j))).collect()).collect(),
    }
}

pub fn format_matrix<S: Scalar>(mat: &OspMatrix<S>) -> String {
    serde_json::to_string(&matrix_to_lit(mat)).expect("literals serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contactmap::random_k1;
    use crate::ospgroup::random_spo21;
    use crate::random;
    use crate::scalar::Rational;

    type Q = Rational;

    #[test]
    fn grassmann_example() {
        let g: Grassmann<Q> = parse_grassmann(r#"[{"mask":[],"value":"1/2"},{"mask":[1,3],"value":-2}]"#, None).unwrap();
        assert_eq!(g.m(), 3);
        assert_eq!(g.body(), Q::from_ratio(1, 2));
        assert_eq!(g.coeff(0b101), Q::from_i64(-2));
        assert_eq!(parse_grassmann::<Q>(&format_grassmann(&g), Some(3)).unwrap(), g);
    }

    #[test]
    fn decimal_values_are_exact() {
        let g: Grassmann<Q> = parse_grassmann(r#"[{"mask":[],"value":"0.125"}]"#, None).unwrap();
        assert_eq!(g.body(), Q::from_ratio(1, 8));
    }

    #[test]
    fn bad_masks_are_located() {
        let e = parse_grassmann::<Q>(r#"[{"mask":[2,1],"value":"1"}]"#, None).unwrap_err();
        assert!(e.to_string().contains("$[0].mask"), "{e}");
        let e = parse_grassmann::<Q>(r#"[{"mask":[0],"value":"1"}]"#, None).unwrap_err();
        assert!(e.to_string().contains("outside"), "{e}");
        let e = parse_grassmann::<Q>(r#"[{"mask":[1],"value":"x"}]"#, None).unwrap_err();
        assert!(e.to_string().contains("$[0].value"), "{e}");
        let e = parse_grassmann::<Q>("[{\"mask\":[1],\n\"value\":}]", None).unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
    }

    #[test]
    fn germ_roundtrip() {
        let mut rng = random::rng(4);
        let g = random_k1::<Q>(&mut rng, 3, Q::from_ratio(1, 3), 5, 3).unwrap();
        let text = format_germ(&g);
        let back = parse_germ::<Q>(&text, 0.0).unwrap();
        assert_eq!(back.phi(), g.phi());
        assert_eq!(back.psi(), g.psi());
        assert_eq!(format_germ(&back), text);
    }

    #[test]
    fn non_contact_germ_rejected() {
        let text = r#"{"N":1,"base_x":0,"K":3,"phi":[{"xi_mask":[],"h_power":1,"value":[{"mask":[],"value":2}]}],
            "psi":[[{"xi_mask":[1],"h_power":0,"value":[{"mask":[],"value":1}]}]]}"#;
        assert!(matches!(parse_germ::<Q>(text, 0.0), Err(Error::NotContact(_))));
    }

    #[test]
    fn matrix_roundtrip() {
        let mut rng = random::rng(5);
        let mat = random_spo21::<Q>(&mut rng, 3).unwrap();
        let text = format_matrix(&mat);
        assert_eq!(parse_matrix::<Q>(&text, 0.0).unwrap(), mat);
    }

    #[test]
    fn points_roundtrip() {
        let text = r#"{"points":[{"x":[{"mask":[],"value":"0"}],"xi":[[{"mask":[1],"value":"1"}]]},
                                 {"x":[{"mask":[],"value":"1"}],"xi":[[]]}]}"#;
        let pts = parse_points::<Q>(text).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(parse_points::<Q>(&format_points(&pts)).unwrap(), pts);
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(parse_jet::<Q>(r#"{"N":0,"base_x":0,"K":1,"terms":[],"extra":1}"#).is_err());
    }
}
