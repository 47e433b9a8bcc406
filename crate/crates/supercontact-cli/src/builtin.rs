//! Built-in vector fields for the `cartan` command.

use supercontact::cartan::VectorField;
use supercontact::{Error, Result, Scalar, SuperJet};

/// `dx`, `euler` or `f=POLY`. For N ≤ 1 `f=POLY` is the contact field of
/// the Hamiltonian `POLY(x)`; for N = 2 it is `POLY(x) ∂x`.
pub fn field<S: Scalar>(spec: &str, n: usize, m: u8, base: S, order: i32) -> Result<VectorField<S>> {
    match spec {
        "dx" => Ok(VectorField::d_dx(n, m, base, order)),
        "euler" => Ok(VectorField::euler(n, m, base, order)),
        _ => {
            let Some(poly) = spec.strip_prefix("f=") else {
                return Err(Error::Parse(format!("unknown builtin field {spec:?} (expected dx, euler or f=POLY)")));
            };
            let f = polynomial(poly, n, m, base.clone(), order)?;
            match n {
                0 => VectorField::new(f, vec![]),
                1 => VectorField::hamiltonian(&f),
                _ => {
                    let z = SuperJet::zero(n, m, base, order);
                    VectorField::new(f, vec![z; n])
                }
            }
        }
    }
}

/// Parses a polynomial in `x` such as `1 - 3/2*x^2 + x` into a jet at `base`.
pub fn polynomial<S: Scalar>(text: &str, n: usize, m: u8, base: S, order: i32) -> Result<SuperJet<S>> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let x = SuperJet::x(n, m, base.clone(), order);
    let mut acc = SuperJet::zero(n, m, base.clone(), order);
    for (pos, term) in split_terms(&compact) {
        let (neg, body) = match term.as_bytes()[0] {
            b'-' => (true, &term[1..]),
            b'+' => (false, &term[1..]),
            _ => (false, term),
        };
        let (coef, power) = parse_term::<S>(body).map_err(|e| Error::Parse(format!("polynomial column {}: {e}", pos + 1)))?;
        let mut t = SuperJet::one(n, m, base.clone(), order).scale(&coef);
        for _ in 0..power {
            t = t.checked_mul(&x)?;
        }
        acc = if neg { acc.checked_sub(&t)? } else { acc.checked_add(&t)? };
    }
    Ok(acc)
}

/// Splits at top-level signs, keeping each sign with its term.
fn split_terms(s: &str) -> Vec<(usize, &str)> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..b.len() {
        if (b[i] == b'+' || b[i] == b'-') && !matches!(b[i - 1], b'e' | b'E' | b'^' | b'*' | b'/') {
            out.push((start, &s[start..i]));
            start = i;
        }
    }
    out.push((start, &s[start..]));
    out
}

fn parse_term<S: Scalar>(t: &str) -> std::result::Result<(S, u32), String> {
    if t.is_empty() {
        return Err("empty term".into());
    }
    let Some(xpos) = t.find('x') else {
        return S::parse_literal(t).map(|c| (c, 0)).map_err(|e| e.to_string());
    };
    let coef = t[..xpos].strip_suffix('*').unwrap_or(&t[..xpos]);
    let coef = if coef.is_empty() { S::one() } else { S::parse_literal(coef).map_err(|e| e.to_string())? };
    let rest = &t[xpos + 1..];
    let power = if rest.is_empty() {
        1
    } else {
        let p = rest.strip_prefix('^').ok_or_else(|| format!("unexpected {rest:?} after x"))?;
        p.parse::<u32>().map_err(|_| format!("bad exponent {p:?}"))?
    };
    Ok((coef, power))
}

#[cfg(test)]
mod tests {
    use super::*;
    use supercontact::Rational;

    type Q = Rational;

    #[test]
    fn polynomial_matches_jet_arithmetic() {
        let base = Q::from_i64(1);
        let p = polynomial::<Q>("1 - 3/2*x^2 + x", 0, 0, base.clone(), 4).unwrap();
        let x = SuperJet::x(0, 0, base.clone(), 4);
        let one = SuperJet::one(0, 0, base, 4);
        let expect = one.checked_add(&x).unwrap().checked_sub(&x.checked_mul(&x).unwrap().scale(&Q::from_ratio(3, 2))).unwrap();
        assert_eq!(p, expect);
    }

    #[test]
    fn rejects_garbage() {
        assert!(polynomial::<Q>("x^y", 0, 0, Q::from_i64(0), 3).is_err());
        assert!(polynomial::<Q>("", 0, 0, Q::from_i64(0), 3).is_err());
        assert!(field::<Q>("curl", 1, 0, Q::from_i64(0), 3).is_err());
    }

    #[test]
    fn hamiltonian_of_constant_is_dx() {
        let base = Q::from_i64(0);
        let f = field::<Q>("f=1", 1, 2, base.clone(), 4).unwrap();
        let d = VectorField::d_dx(1, 2, base, 4);
        assert_eq!(f.a, d.a);
        assert!(f.g[0].is_zero());
    }
}
