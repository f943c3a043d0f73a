//! Replays the checked-in fuzz seeds through the same entry points.

use photon_exchange::pipeline::io::{parse_count_records, write_count_records};
use photon_exchange_cli::parse_config;
use std::fs;
use std::path::PathBuf;

fn seeds(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            let bytes = fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn count_csv_seeds() {
    let mut parsed = 0;
    for (path, bytes) in seeds("count_csv") {
        let Ok(records) = parse_count_records(&bytes) else { continue };
        parsed += 1;
        let mut buf = Vec::new();
        write_count_records(&mut buf, &records).unwrap();
        assert_eq!(parse_count_records(&buf).unwrap(), records, "{}", path.display());
    }
    assert!(parsed >= 2);
}

#[test]
fn run_config_seeds() {
    let mut parsed = 0;
    for (_, bytes) in seeds("run_config") {
        if let Ok(config) = parse_config(&bytes) {
            parsed += 1;
            assert!(!config.delays().unwrap().is_empty());
            config.params().unwrap();
        }
    }
    assert!(parsed >= 2);
}
