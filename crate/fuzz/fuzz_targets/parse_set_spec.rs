#![no_main]

use libfuzzer_sys::fuzz_target;
use sfp_core::textio::SetSpec;

fuzz_target!(|bytes: &[u8]| {
    if let Ok(text) = std::str::from_utf8(bytes) {
        if let Ok(spec) = SetSpec::parse(text) {
            // resolve without touching the file system
            let _ = spec.resolve_with(|_| Ok(vec![0.0, 1.0]));
        }
    }
});
