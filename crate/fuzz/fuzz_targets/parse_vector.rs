#![no_main]

use libfuzzer_sys::fuzz_target;
use sfp_core::textio::{parse_vector, write_vector};

fuzz_target!(|bytes: &[u8]| {
    if let Ok(text) = std::str::from_utf8(bytes) {
        if let Ok(v) = parse_vector(text) {
            assert!(v.iter().all(|x| x.is_finite()));
            assert_eq!(parse_vector(&write_vector(&v)).unwrap(), v);
        }
    }
});
