#![no_main]
use libfuzzer_sys::fuzz_target;
use spikescore::experiment::AblationAxis;
use spikescore::Regularizer;
use std::str;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = str::from_utf8(data) {
        if let Ok(r) = s.parse::<Regularizer>() {
            assert_eq!(r.to_string().parse::<Regularizer>().unwrap(), r);
        }
        if let Ok(a) = s.parse::<AblationAxis>() {
            assert_eq!(a.to_string().parse::<AblationAxis>().unwrap(), a);
        }
    }
});
