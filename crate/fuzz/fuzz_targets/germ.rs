#![no_main]

use libfuzzer_sys::fuzz_target;
use supercontact::literal::{format_germ, parse_germ, parse_germ_uncertified};
use supercontact::Rational;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_germ_uncertified::<Rational>(text) {
        let again = parse_germ_uncertified::<Rational>(&format_germ(&g)).unwrap();
        assert_eq!(format_germ(&again), format_germ(&g));
        let _ = parse_germ::<Rational>(text, 0.0);
    }
});
