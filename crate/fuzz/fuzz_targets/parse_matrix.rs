#![no_main]

use libfuzzer_sys::fuzz_target;
use sfp_core::textio::{parse_matrix, write_matrix};

fuzz_target!(|bytes: &[u8]| {
    if let Ok(text) = std::str::from_utf8(bytes) {
        if let Ok(a) = parse_matrix(text) {
            let again = parse_matrix(&write_matrix(&a)).unwrap();
            assert_eq!(a, again);
        }
    }
});
