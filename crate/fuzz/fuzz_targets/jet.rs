#![no_main]

use libfuzzer_sys::fuzz_target;
use supercontact::literal::{format_jet, parse_jet};
use supercontact::Rational;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = parse_jet::<Rational>(text) {
        assert_eq!(parse_jet::<Rational>(&format_jet(&f)).unwrap(), f);
    }
});
