#![no_main]

use libfuzzer_sys::fuzz_target;
use supercontact::literal::{format_matrix, parse_matrix, parse_matrix_unchecked};
use supercontact::Rational;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_matrix_unchecked::<Rational>(text) {
        let again = parse_matrix_unchecked::<Rational>(&format_matrix(&m)).unwrap();
        assert_eq!(format_matrix(&again), format_matrix(&m));
        let _ = parse_matrix::<Rational>(text, 0.0);
    }
});
