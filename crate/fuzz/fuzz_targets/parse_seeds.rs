#![no_main]
use std::collections::HashSet;

use clamp_cli::runner::{parse_seeds, MAX_SWEEP_SEEDS};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(spec) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(seeds) = parse_seeds(spec) {
        assert!(!seeds.is_empty() && seeds.len() <= MAX_SWEEP_SEEDS);
        let unique: HashSet<_> = seeds.iter().collect();
        assert_eq!(unique.len(), seeds.len());
    }
});
