//! Replays the checked-in fuzz corpus through the same checks the fuzz
//! targets make, so a crash found by fuzzing stays fixed under `cargo test`.

use std::collections::HashSet;
use std::fs;
use std::path::PathBuf;

use spikescore::experiment::{parse_pgm, parse_seed_list, AblationAxis, ExperimentConfig, Heatmap};
use spikescore::lab::parse_jsonl;
use spikescore::sim::DenseMatrix;
use spikescore::Regularizer;

fn corpus(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut files: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    assert!(!files.is_empty(), "empty corpus {target}");
    files
        .into_iter()
        .filter_map(|p| {
            let text = String::from_utf8(fs::read(&p).unwrap()).ok()?;
            Some((p.file_name().unwrap().to_string_lossy().into_owned(), text))
        })
        .collect()
}

#[test]
fn config_toml() {
    for (name, s) in corpus("config_toml") {
        if let Ok(cfg) = ExperimentConfig::from_toml_str(&s) {
            assert_eq!(ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap(), cfg, "{name}");
        }
    }
}

#[test]
fn config_override() {
    for (_, s) in corpus("config_override") {
        let _ = ExperimentConfig::from_toml_with_overrides("", s.lines().filter_map(|l| l.split_once('=')));
    }
}

#[test]
fn weight_csv() {
    for (name, s) in corpus("weight_csv") {
        if let Ok(m) = DenseMatrix::parse_csv(&s) {
            if m.values.iter().flatten().all(|v| v.is_finite()) {
                assert_eq!(DenseMatrix::parse_csv(&m.to_csv_string()).unwrap(), m, "{name}");
            }
        }
    }
}

#[test]
fn heatmap_csv() {
    for (name, s) in corpus("heatmap_csv") {
        if let Ok(h) = Heatmap::parse_csv(&s) {
            assert_eq!(Heatmap::parse_csv(&h.to_csv()).unwrap(), h, "{name}");
            let pgm = parse_pgm(&h.to_pgm()).unwrap();
            assert_eq!((pgm.height, pgm.width), (h.rows(), h.cols()), "{name}");
        }
    }
}

#[test]
fn pgm() {
    let parsed: Vec<_> = corpus("pgm").into_iter().map(|(n, s)| (n, parse_pgm(&s).is_ok())).collect();
    assert!(parsed.iter().any(|(_, ok)| *ok), "{parsed:?}");
}

#[test]
fn seed_list() {
    for (name, s) in corpus("seed_list") {
        if let Ok(seeds) = parse_seed_list(&s) {
            assert!(!seeds.is_empty(), "{name}");
            assert_eq!(seeds.iter().collect::<HashSet<_>>().len(), seeds.len(), "{name}");
        }
    }
}

#[test]
fn lab_jsonl() {
    for (name, s) in corpus("lab_jsonl") {
        if let Ok(records) = parse_jsonl(&s) {
            assert_eq!(records.len(), s.lines().filter(|l| !l.trim().is_empty()).count(), "{name}");
        }
    }
}

#[test]
fn names() {
    for (_, s) in corpus("names") {
        if let Ok(r) = s.parse::<Regularizer>() {
            assert_eq!(r.to_string().parse::<Regularizer>().unwrap(), r);
        }
        if let Ok(a) = s.parse::<AblationAxis>() {
            assert_eq!(a.to_string().parse::<AblationAxis>().unwrap(), a);
        }
    }
}
