#![no_main]

use libfuzzer_sys::fuzz_target;
use ris_cli::{parse_override, Config};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_override(text);
    let mut cfg = Config::default();
    if cfg.set(text).is_ok() {
        let rendered = cfg.render();
        assert_eq!(Config::from_text(&rendered, "rendered").expect("rendered config parses"), cfg);
    }
});
