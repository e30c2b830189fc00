#![no_main]
use libfuzzer_sys::fuzz_target;
use spikescore::experiment::ExperimentConfig;
use std::str;

// Input is `NAME=VALUE` lines applied as environment overrides to the defaults.
fuzz_target!(|data: &[u8]| {
    if let Ok(s) = str::from_utf8(data) {
        let vars = s.lines().filter_map(|l| l.split_once('='));
        let _ = ExperimentConfig::from_toml_with_overrides("", vars);
    }
});
