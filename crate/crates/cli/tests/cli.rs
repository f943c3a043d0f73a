use photon_exchange::pipeline::{dip_metrics, normalize_to_baseline, smooth_ratio, RatioPoint};
use photon_exchange_cli::run;
use std::fs;
use std::path::Path;

fn run_in(dir: &Path, args: &[&str]) -> i32 {
    let mut argv = vec!["photon-exchange".to_string()];
    argv.extend(args.iter().map(|a| a.replace("{dir}", dir.to_str().unwrap())));
    run(argv)
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn sweep_defaults_put_the_minimum_between_six_and_fourteen_fs() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_in(dir.path(), &["sweep", "-o", "{dir}/s.csv"]), 0);
    let csv = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert!(csv.starts_with("delay_fs,upsilon,xi,p_both_pass,p_one_abs,p_both_abs,ratio\n"));
    let (d, r) = (column(&csv, "delay_fs"), column(&csv, "ratio"));
    assert_eq!(d.len(), 241);
    let k = (0..r.len()).min_by(|&a, &b| r[a].total_cmp(&r[b])).unwrap();
    assert!((6.0..=14.0).contains(&d[k].abs()));
}

#[test]
fn config_file_and_flags_give_identical_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"mode_match": 0.55, "delay_min_fs": -30, "delay_max_fs": 30, "delay_step_fs": 1}"#).unwrap();
    assert_eq!(run_in(dir.path(), &["sweep", "--config", "{dir}/c.json", "-o", "{dir}/a.csv"]), 0);
    let flags = ["sweep", "--mode-match", "0.55", "--delay-min-fs", "-30", "--delay-max-fs", "30"];
    let mut with_flags = flags.to_vec();
    with_flags.extend(["--delay-step-fs", "1", "-o", "{dir}/b.csv"]);
    assert_eq!(run_in(dir.path(), &with_flags), 0);
    assert_eq!(fs::read(dir.path().join("a.csv")).unwrap(), fs::read(dir.path().join("b.csv")).unwrap());
    // flags win over the file
    assert_eq!(run_in(dir.path(), &["sweep", "--config", "{dir}/c.json", "--mode-match", "1", "-o", "{dir}/c.csv"]), 0);
    let c = fs::read_to_string(dir.path().join("c.csv")).unwrap();
    let r0 = column(&c, "ratio")[30];
    assert!((r0 - 1.0).abs() < 1e-6);
}

#[test]
fn synth_and_sweep_are_byte_identical_on_rerun() {
    let dir = tempfile::tempdir().unwrap();
    for stem in ["a", "b"] {
        let out = format!("{{dir}}/{stem}");
        assert_eq!(run_in(dir.path(), &["synth", "--seed", "42", "-o", &out]), 0);
        assert_eq!(run_in(dir.path(), &["sweep", "-o", &format!("{out}.csv")]), 0);
    }
    for suffix in ["_mirror.csv", "_filter.csv", ".csv"] {
        let a = fs::read(dir.path().join(format!("a{suffix}"))).unwrap();
        let b = fs::read(dir.path().join(format!("b{suffix}"))).unwrap();
        assert_eq!(a, b, "{suffix}");
    }
    assert_eq!(run_in(dir.path(), &["synth", "--seed", "43", "-o", "{dir}/c"]), 0);
    assert_ne!(
        fs::read(dir.path().join("a_mirror.csv")).unwrap(),
        fs::read(dir.path().join("c_mirror.csv")).unwrap()
    );
}

#[test]
fn analyze_of_noiseless_synth_matches_the_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let grid = ["--delay-min-fs", "-40", "--delay-max-fs", "40", "--delay-step-fs", "1"];
    let mut synth = vec!["synth", "--noiseless", "--mean-pairs", "1e12", "-o", "{dir}/n"];
    synth.extend(grid);
    assert_eq!(run_in(dir.path(), &synth), 0);
    let analyze = ["analyze", "--mirror", "{dir}/n_mirror.csv", "--filter", "{dir}/n_filter.csv", "-o", "{dir}/r.json"];
    assert_eq!(run_in(dir.path(), &analyze), 0);
    let mut sweep = vec!["sweep", "-o", "{dir}/s.csv"];
    sweep.extend(grid);
    assert_eq!(run_in(dir.path(), &sweep), 0);

    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    let csv = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let pts: Vec<RatioPoint> = column(&csv, "delay_fs")
        .into_iter()
        .zip(column(&csv, "ratio"))
        .map(|(delay, ratio)| RatioPoint { delay, ratio, stderr: 0.0 })
        .collect();
    let theory = normalize_to_baseline(pts).unwrap();
    for (key, series) in [("dip", smooth_ratio(&theory).unwrap()), ("dip_unsmoothed", theory.clone())] {
        let m = dip_metrics(&series).unwrap();
        for (side, expect) in [("left", m.left.unwrap()), ("right", m.right.unwrap())] {
            let got = &report[key][side];
            let depth = got["depth_vs_long"].as_f64().unwrap();
            assert!((depth - expect.depth_vs_long).abs() < 1e-6, "{key}.{side}: {depth} vs {}", expect.depth_vs_long);
            let zero = got["depth_vs_zero"].as_f64().unwrap();
            assert!((zero - expect.depth_vs_zero).abs() < 1e-6);
            assert!((got["tau_min"].as_f64().unwrap() - expect.tau_min).abs() < 1e-4);
        }
    }
    assert_eq!(report["dip_degenerate"], false);
    let fwhm = report["fit"]["fitted_fwhm_nm"].as_f64().unwrap();
    assert!((fwhm - 129.0).abs() < 1e-3, "{fwhm}");
}

#[test]
fn oracle_check_defaults_stay_below_a_thousandth() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_in(dir.path(), &["oracle-check", "-o", "{dir}/o.json"]), 0);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("o.json")).unwrap()).unwrap();
    assert_eq!(report["n_bins"], 128);
    assert_eq!(report["points"].as_array().unwrap().len(), 5);
    assert!(report["max_discrepancy"].as_f64().unwrap() < 1e-3);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_in(dir.path(), &["sweep", "--no-such-flag"]), 1);
    assert_eq!(run_in(dir.path(), &["frobnicate"]), 1);
    assert_eq!(run_in(dir.path(), &["sweep", "--mode-match", "1.5"]), 1);
    fs::write(dir.path().join("bad.json"), "{ not json").unwrap();
    assert_eq!(run_in(dir.path(), &["sweep", "--config", "{dir}/bad.json"]), 1);
    fs::write(dir.path().join("bad.csv"), "delay_fs,coincidences\n1,2\n").unwrap();
    assert_eq!(run_in(dir.path(), &["analyze", "--mirror", "{dir}/bad.csv", "--filter", "{dir}/bad.csv"]), 1);
    assert_eq!(run_in(dir.path(), &["analyze", "--mirror", "{dir}/missing.csv", "--filter", "{dir}/bad.csv"]), 1);
    // a pump this narrow is below what the quadrature can resolve
    let narrow = ["sweep", "--correlation-kind", "anticorrelated", "--pump-fwhm-nm", "1e-12", "-o", "{dir}/n.csv"];
    assert_eq!(run_in(dir.path(), &narrow), 2);
    assert_eq!(run_in(dir.path(), &["--help"]), 0);
}
