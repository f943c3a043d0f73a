use photon_exchange::{normalized_ratio_sweep, Correlation, ExperimentParams};
use proptest::prelude::*;

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|k| lo + k as f64 * step).collect()
}

#[test]
fn transmission_is_suppressed_inside_fifteen_fs() {
    let sweep = normalized_ratio_sweep(&ExperimentParams::experiment_defaults(), &grid(-15.0, 15.0, 0.25)).unwrap();
    for p in &sweep.points {
        assert!(p.ratio <= 1.0 + 1e-9, "{} fs: {}", p.delay, p.ratio);
        if (5.0..=13.0).contains(&p.delay.abs()) {
            assert!(p.ratio < 0.99);
        }
    }
}

#[test]
fn product_minimum_sits_near_eight_fs() {
    let sweep = normalized_ratio_sweep(&ExperimentParams::experiment_defaults(), &grid(-60.0, 60.0, 0.5)).unwrap();
    let min = sweep.minimum().unwrap();
    assert!((6.0..=14.0).contains(&min.delay.abs()));
    assert!((0.02..=0.08).contains(&(1.0 - min.ratio)));
}

#[test]
fn monochromatic_pump_suppression_lasts_longer() {
    let d = grid(0.0, 60.0, 1.0);
    let dotted = normalized_ratio_sweep(
        &ExperimentParams::experiment_defaults().with_correlation(Correlation::Anticorrelated { pump_fwhm: 0.0 }),
        &d,
    )
    .unwrap();
    let at40 = dotted.points.iter().find(|p| p.delay == 40.0).unwrap();
    let max_dev = dotted.points.iter().map(|p| (p.ratio - 1.0).abs()).fold(0.0, f64::max);
    assert!((at40.ratio - 1.0).abs() > 0.5 * max_dev);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sweep_is_even_and_unitary(
        fwhm in 30.0f64..200.0,
        line_fwhm in 2.0f64..40.0,
        depth in 0.0f64..=1.0,
        mu in 0.0f64..=1.0,
        tau in 0.0f64..60.0,
    ) {
        let mut params = ExperimentParams::experiment_defaults().with_mode_match(mu);
        params.photon = photon_exchange::gaussian_amplitude(810.0, fwhm, 0.0).unwrap();
        params.absorber = photon_exchange::gaussian_line(810.0, line_fwhm, depth).unwrap();
        let s = normalized_ratio_sweep(&params, &[-tau, tau]).unwrap();
        prop_assert!((s.points[0].ratio - s.points[1].ratio).abs() < 1e-9);
        for p in &s.points {
            prop_assert!((p.outcomes.total() - 1.0).abs() < 1e-9);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&p.upsilon));
            if let Some(xi) = p.xi {
                prop_assert!((0.0..=1.0 + 1e-12).contains(&xi));
            }
        }
    }
}
