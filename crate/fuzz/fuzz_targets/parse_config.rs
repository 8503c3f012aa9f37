//! Run configuration parser: arbitrary text must never panic, and any
//! accepted config must survive a print/parse round trip and build.
//!
//! Run with:
//!   cargo +nightly fuzz run parse_config
#![no_main]
use clamp_cli::parse_config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(cfg) = parse_config(text) else {
        return;
    };
    let printed = cfg.to_toml();
    let again = parse_config(&printed).expect("printed config parses");
    assert_eq!(cfg, again);
    cfg.build().expect("validated config builds");
});
