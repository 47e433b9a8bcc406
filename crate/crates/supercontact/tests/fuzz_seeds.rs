//! Runs the fuzz targets' roundtrip properties over the checked-in corpus seeds.

use std::path::PathBuf;

use supercontact::literal::*;
use supercontact::{Rational, Scalar};

type Q = Rational;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fuzz", "corpus", target].iter().collect();
    let mut v: Vec<(String, String)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    v.sort();
    assert!(!v.is_empty(), "no seeds for {target}");
    v
}

/// Every target has at least one seed that parses.
fn parsed(target: &str, ok: usize) {
    assert!(ok > 0, "no {target} seed parsed");
}

#[test]
fn scalar_seeds_roundtrip() {
    let mut ok = 0;
    for (_, s) in seeds("scalar") {
        if let Ok(q) = Q::parse_literal(&s) {
            assert_eq!(Q::parse_literal(&q.to_literal()).unwrap(), q);
            ok += 1;
        }
    }
    parsed("scalar", ok);
}

#[test]
fn grassmann_seeds_roundtrip() {
    let mut ok = 0;
    for (_, s) in seeds("grassmann") {
        if let Ok(g) = parse_grassmann::<Q>(&s, None) {
            assert_eq!(parse_grassmann::<Q>(&format_grassmann(&g), Some(g.m())).unwrap(), g);
            ok += 1;
        }
    }
    parsed("grassmann", ok);
}

#[test]
fn jet_seeds_roundtrip() {
    let mut ok = 0;
    for (name, s) in seeds("jet") {
        match parse_jet::<Q>(&s) {
            Ok(f) => {
                assert_eq!(parse_jet::<Q>(&format_jet(&f)).unwrap(), f, "{name}");
                ok += 1;
            }
            Err(e) => assert!(name == "truncated", "{name}: {e}"),
        }
    }
    parsed("jet", ok);
}

#[test]
fn point_seeds_roundtrip() {
    for (name, s) in seeds("points") {
        let p = parse_points::<Q>(&s).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parse_points::<Q>(&format_points(&p)).unwrap(), p);
    }
}

#[test]
fn germ_seeds_roundtrip_and_certify() {
    for (name, s) in seeds("germ") {
        if name == "huge_order" {
            assert!(parse_germ_uncertified::<Q>(&s).is_err());
            continue;
        }
        let g = parse_germ::<Q>(&s, 0.0).unwrap_or_else(|e| panic!("{name}: {e}"));
        let again = parse_germ_uncertified::<Q>(&format_germ(&g)).unwrap();
        assert_eq!(format_germ(&again), format_germ(&g));
    }
}

#[test]
fn field_seeds_roundtrip() {
    for (name, s) in seeds("field") {
        let x = parse_field::<Q>(&s).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(format_field(&parse_field::<Q>(&format_field(&x)).unwrap()), format_field(&x));
    }
}

#[test]
fn matrix_seeds_roundtrip_and_check() {
    for (name, s) in seeds("matrix") {
        let m = parse_matrix::<Q>(&s, 0.0).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(format_matrix(&parse_matrix_unchecked::<Q>(&format_matrix(&m)).unwrap()), format_matrix(&m));
    }
}

fn decode_all(s: &str) {
    let _ = Q::parse_literal(s);
    let _ = f64::parse_literal(s);
    let _ = parse_grassmann::<Q>(s, None);
    let _ = parse_jet::<Q>(s);
    let _ = parse_points::<Q>(s);
    let _ = parse_germ::<Q>(s, 0.0);
    let _ = parse_germ::<f64>(s, 1e-9);
    let _ = parse_field::<Q>(s);
    let _ = parse_matrix::<Q>(s, 0.0);
}

#[test]
fn mutated_seeds_never_panic() {
    let subs = [b'0', b'9', b'-', b'/', b'[', b'"', b'}'];
    for target in ["scalar", "grassmann", "jet", "points", "germ", "field", "matrix"] {
        for (_, s) in seeds(target) {
            let bytes = s.as_bytes();
            let step = (bytes.len() / 400).max(1);
            for cut in (0..bytes.len()).step_by(step) {
                decode_all(&String::from_utf8_lossy(&bytes[..cut]));
                for &c in &subs {
                    let mut b = bytes.to_vec();
                    b[cut] = c;
                    decode_all(&String::from_utf8_lossy(&b));
                }
            }
        }
    }
}
