#![no_main]
use libfuzzer_sys::fuzz_target;
use spikescore::experiment::{parse_pgm, Heatmap};
use std::str;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = str::from_utf8(data) {
        if let Ok(h) = Heatmap::parse_csv(s) {
            assert_eq!(Heatmap::parse_csv(&h.to_csv()).unwrap(), h);
            let pgm = parse_pgm(&h.to_pgm()).unwrap();
            assert_eq!((pgm.height, pgm.width), (h.rows(), h.cols()));
        }
    }
});
