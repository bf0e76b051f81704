#![no_main]

use libfuzzer_sys::fuzz_target;
use ris_core::PolicyId;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = text.parse::<PolicyId>() {
        assert_eq!(p.name().parse::<PolicyId>().ok(), Some(p));
    }
});
