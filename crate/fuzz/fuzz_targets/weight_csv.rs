#![no_main]
use libfuzzer_sys::fuzz_target;
use spikescore::sim::DenseMatrix;
use std::str;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = str::from_utf8(data) {
        if let Ok(m) = DenseMatrix::parse_csv(s) {
            if m.values.iter().flatten().all(|v| v.is_finite()) {
                assert_eq!(DenseMatrix::parse_csv(&m.to_csv_string()).unwrap(), m);
            }
        }
    }
});
