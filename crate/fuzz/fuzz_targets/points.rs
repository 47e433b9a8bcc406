#![no_main]

use libfuzzer_sys::fuzz_target;
use supercontact::literal::{format_points, parse_points};
use supercontact::Rational;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_points::<Rational>(text) {
        assert_eq!(parse_points::<Rational>(&format_points(&p)).unwrap(), p);
    }
});
