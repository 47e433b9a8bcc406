#![no_main]

use libfuzzer_sys::fuzz_target;
use supercontact::literal::{format_field, parse_field};
use supercontact::Rational;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(x) = parse_field::<Rational>(text) {
        let again = parse_field::<Rational>(&format_field(&x)).unwrap();
        assert_eq!(format_field(&again), format_field(&x));
    }
});
