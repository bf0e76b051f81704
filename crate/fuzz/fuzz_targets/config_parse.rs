#![no_main]

use libfuzzer_sys::fuzz_target;
use ris_cli::Config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = Config::from_text(text, "fuzz") {
        let rendered = cfg.render();
        let back = Config::from_text(&rendered, "rendered").expect("rendered config parses");
        assert_eq!(back.render(), rendered);
        let _ = cfg.scenario();
        let _ = cfg.tracking();
    }
});
