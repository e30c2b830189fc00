#![no_main]
use libfuzzer_sys::fuzz_target;
use spikescore::experiment::parse_seed_list;
use std::collections::HashSet;
use std::str;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = str::from_utf8(data) {
        if let Ok(seeds) = parse_seed_list(s) {
            assert!(!seeds.is_empty());
            assert_eq!(seeds.iter().collect::<HashSet<_>>().len(), seeds.len());
        }
    }
});
