#![no_main]

use libfuzzer_sys::fuzz_target;
use sfp_core::harness::BenchConfig;

fuzz_target!(|bytes: &[u8]| {
    if let Ok(text) = std::str::from_utf8(bytes) {
        if let Ok(cfg) = BenchConfig::parse(text) {
            let _ = cfg.validate();
        }
    }
});
