#![no_main]

use libfuzzer_sys::fuzz_target;
use supercontact::literal::{format_grassmann, parse_grassmann};
use supercontact::Rational;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_grassmann::<Rational>(text, None) {
        let again = parse_grassmann::<Rational>(&format_grassmann(&g), Some(g.m())).unwrap();
        assert_eq!(again, g);
    }
});
