use photon_exchange::pipeline::{
    dip_metrics, expected_counts, fit_hom_width_samples, normalize_to_baseline, ratio_normalize, smooth_ratio,
    synthesize_counts, RatioPoint,
};
use photon_exchange::{normalized_ratio_sweep, ExperimentParams};

fn delays() -> Vec<f64> {
    (-40..=40).map(|k| k as f64).collect()
}

#[test]
fn noiseless_mirror_fit_recovers_width() {
    let params = ExperimentParams::experiment_defaults().with_mode_match(0.55);
    let e = expected_counts(&params, &delays(), 1e4, false).unwrap();
    let tau: Vec<f64> = e.iter().map(|x| x.delay).collect();
    let y: Vec<f64> = e.iter().map(|x| x.coincidences).collect();
    let fit = fit_hom_width_samples(&tau, &y, 810.0).unwrap();
    assert!(fit.converged);
    assert!((fit.fitted_fwhm_nm - 129.0).abs() < 1e-3, "{fit:?}");
    assert!((fit.hom_enhancement - 0.55).abs() < 1e-6);
}

#[test]
fn mirror_pairing_approaches_fifty_five_percent() {
    let params = ExperimentParams::experiment_defaults().with_mode_match(0.55);
    let e = expected_counts(&params, &[0.0, 60.0], 1e9, false).unwrap();
    assert!((e[0].coincidences / e[1].coincidences - 1.55).abs() < 1e-9);
}

#[test]
fn noiseless_ratio_matches_sweep_up_to_baseline() {
    let params = ExperimentParams::experiment_defaults();
    let d = delays();
    let filt = expected_counts(&params, &d, 1e4, true).unwrap();
    let mirr = expected_counts(&params, &d, 1e4, false).unwrap();
    let raw: Vec<RatioPoint> = filt
        .iter()
        .zip(&mirr)
        .map(|(f, m)| RatioPoint { delay: f.delay, ratio: f.coincidences / m.coincidences, stderr: 0.0 })
        .collect();
    let got = normalize_to_baseline(raw).unwrap();
    let sweep = normalized_ratio_sweep(&params, &d).unwrap();
    // the sweep is normalized to the infinite-delay limit, the data to its wings
    let scale = got[0].ratio / sweep.points[0].ratio;
    for (g, s) in got.iter().zip(&sweep.points) {
        assert!((g.ratio - scale * s.ratio).abs() < 1e-9);
    }
}

#[test]
fn theory_dip_is_symmetric_and_near_ten_fs() {
    let params = ExperimentParams::experiment_defaults();
    let sweep = normalized_ratio_sweep(&params, &delays()).unwrap();
    let pts: Vec<RatioPoint> =
        sweep.points.iter().map(|p| RatioPoint { delay: p.delay, ratio: p.ratio, stderr: 0.0 }).collect();
    let m = dip_metrics(&pts).unwrap();
    let (l, r) = (m.left.unwrap(), m.right.unwrap());
    assert!((l.tau_min + r.tau_min).abs() < 1e-9);
    assert!((6.0..=14.0).contains(&r.tau_min));
    assert!(r.depth_vs_zero > 0.0);
}

#[test]
fn poisson_ratio_scatters_within_its_error_bars() {
    let params = ExperimentParams::experiment_defaults();
    let d = delays();
    let m = synthesize_counts(&params, &d, 1e6, false, 11).unwrap();
    let f = synthesize_counts(&params, &d, 1e6, true, 12).unwrap();
    let got = ratio_normalize(&f, &m).unwrap();
    let sweep = normalized_ratio_sweep(&params, &d).unwrap();
    let theory = normalize_to_baseline(
        sweep.points.iter().map(|p| RatioPoint { delay: p.delay, ratio: p.ratio, stderr: 0.0 }).collect(),
    )
    .unwrap();
    let chi2: f64 = got.iter().zip(&theory).map(|(g, t)| ((g.ratio - t.ratio) / g.stderr).powi(2)).sum();
    let n = got.len() as f64;
    // loose 5σ band on a χ² with n degrees of freedom
    assert!((chi2 - n).abs() < 5.0 * (2.0 * n).sqrt(), "χ² = {chi2} for {n} points");
    assert_eq!(smooth_ratio(&got).unwrap().len(), got.len());
}
