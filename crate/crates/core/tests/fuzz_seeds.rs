//! Replays the checked-in fuzz corpus through the same invariants as the
//! fuzz targets, so the seeds stay meaningful without cargo-fuzz.

use std::path::PathBuf;

use pdee::experiments::ExperimentConfig;
use pdee::noise::PathEnsemble;

fn corpus(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut seeds: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .map(|p| {
            let bytes = std::fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    seeds.sort();
    assert!(!seeds.is_empty());
    seeds
}

#[test]
fn ensemble_seeds_round_trip_or_reject() {
    let mut accepted = 0;
    for (path, bytes) in corpus("ensemble_decode") {
        if let Ok(ensemble) = PathEnsemble::from_bytes(&bytes) {
            assert_eq!(ensemble.to_bytes(), bytes, "{}", path.display());
            accepted += 1;
        }
    }
    assert!(accepted >= 2);
}

#[test]
fn config_seeds_round_trip_or_reject() {
    let mut valid = 0;
    for (path, bytes) in corpus("config_parse") {
        let Ok(text) = std::str::from_utf8(&bytes) else {
            continue;
        };
        let Ok(config) = ExperimentConfig::from_toml_str(text) else {
            continue;
        };
        if config.validate().is_ok() {
            let again = ExperimentConfig::from_toml_str(&config.to_toml()).unwrap();
            assert_eq!(again, config, "{}", path.display());
            valid += 1;
        }
    }
    assert!(valid >= 14);
}
