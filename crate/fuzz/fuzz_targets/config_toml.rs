#![no_main]
use libfuzzer_sys::fuzz_target;
use spikescore::experiment::ExperimentConfig;
use std::str;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = str::from_utf8(data) {
        if let Ok(cfg) = ExperimentConfig::from_toml_str(s) {
            let again = ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
            assert_eq!(cfg, again);
        }
    }
});
