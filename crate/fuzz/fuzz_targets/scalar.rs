#![no_main]

use libfuzzer_sys::fuzz_target;
use supercontact::{Rational, Scalar};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(q) = Rational::parse_literal(text) {
        assert_eq!(Rational::parse_literal(&q.to_literal()).unwrap(), q);
    }
    if let Ok(x) = f64::parse_literal(text) {
        let back = f64::parse_literal(&x.to_literal()).unwrap();
        assert!(back == x || (back.is_nan() && x.is_nan()));
    }
});
