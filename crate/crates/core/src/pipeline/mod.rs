//! Synthetic coincidence experiment and the analysis chain applied to it:
//! mirror normalization, 5-point smoothing, HOM width fit and dip extraction.

mod dip;
mod fit;
pub mod io;

pub use dip::{dip_metrics, DipMetrics, SideDip};
pub use fit::{fit_hom_width, fit_hom_width_samples, FitReport};

use crate::exchange::{normalized_ratio_sweep, ExperimentParams};
use crate::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

/// Detector singles per produced pair. Low collection efficiency makes singles
/// far more numerous than coincidences; the value only sets the count scale.
pub const SINGLES_PER_PAIR: f64 = 20.0;

/// Delays at or beyond this magnitude (fs) form the ratio baseline.
pub const BASELINE_MIN_DELAY: f64 = 20.0;

/// One delay setting of a counting run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    #[serde(rename = "delay_fs")]
    pub delay: f64,
    pub coincidences: u64,
    pub singles_1: u64,
    pub singles_2: u64,
    #[serde(rename = "tag")]
    pub integration_tag: String,
}

/// Expected (noise-free) counts at one delay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectedCounts {
    pub delay: f64,
    pub coincidences: f64,
    pub singles_1: f64,
    pub singles_2: f64,
}

/// Normalized filter-to-mirror ratio at one delay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub delay: f64,
    pub ratio: f64,
    pub stderr: f64,
}

pub(crate) fn check_increasing(delays: impl IntoIterator<Item = f64>) -> Result<()> {
    let mut last = f64::NEG_INFINITY;
    for d in delays {
        if !d.is_finite() {
            return Err(Error::Contract(format!("non-finite delay {d}")));
        }
        if d <= last {
            return Err(Error::Contract(format!("delays must be strictly increasing ({last} then {d})")));
        }
        last = d;
    }
    Ok(())
}

/// Noise-free count expectations of the mirror (`with_absorber = false`) or
/// filter run.
///
/// Coincidences follow the produced-pair rate `1 + μυ(τ)`, scaled so the rate
/// far from zero delay is `mean_pairs`; the filter run further multiplies by the
/// pair-transmission probability. Singles do not depend on the delay.
pub fn expected_counts(
    params: &ExperimentParams,
    delays: &[f64],
    mean_pairs: f64,
    with_absorber: bool,
) -> Result<Vec<ExpectedCounts>> {
    if !(mean_pairs > 0.0) || !mean_pairs.is_finite() {
        return Err(Error::Contract(format!("mean pair count must be positive, got {mean_pairs}")));
    }
    check_increasing(delays.iter().copied())?;
    let sweep = normalized_ratio_sweep(params, delays)?;
    let mu = params.mode_match;
    Ok(sweep
        .points
        .iter()
        .map(|p| {
            let produced = mean_pairs * (1.0 + mu * p.upsilon);
            let singles = mean_pairs * SINGLES_PER_PAIR;
            if with_absorber {
                ExpectedCounts {
                    delay: p.delay,
                    coincidences: produced * p.outcomes.both_transmitted,
                    singles_1: singles * (1.0 - p.p_a),
                    singles_2: singles * (1.0 - p.p_b),
                }
            } else {
                ExpectedCounts { delay: p.delay, coincidences: produced, singles_1: singles, singles_2: singles }
            }
        })
        .collect())
}

fn tag(with_absorber: bool) -> &'static str {
    if with_absorber {
        "filter"
    } else {
        "mirror"
    }
}

/// Expected counts rounded to the nearest integer.
pub fn noiseless_counts(
    params: &ExperimentParams,
    delays: &[f64],
    mean_pairs: f64,
    with_absorber: bool,
) -> Result<Vec<CountRecord>> {
    Ok(expected_counts(params, delays, mean_pairs, with_absorber)?
        .into_iter()
        .map(|e| CountRecord {
            delay: e.delay,
            coincidences: e.coincidences.round() as u64,
            singles_1: e.singles_1.round() as u64,
            singles_2: e.singles_2.round() as u64,
            integration_tag: tag(with_absorber).to_owned(),
        })
        .collect())
}

/// Poisson-distributed counts; a deterministic function of the inputs and `seed`.
pub fn synthesize_counts(
    params: &ExperimentParams,
    delays: &[f64],
    mean_pairs: f64,
    with_absorber: bool,
    seed: u64,
) -> Result<Vec<CountRecord>> {
    let expected = expected_counts(params, delays, mean_pairs, with_absorber)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |lambda: f64| -> Result<u64> {
        if lambda <= 0.0 {
            return Ok(0);
        }
        let dist = Poisson::new(lambda).map_err(|e| Error::Domain(format!("Poisson mean {lambda}: {e}")))?;
        Ok(dist.sample(&mut rng) as u64)
    };
    expected
        .into_iter()
        .map(|e| {
            Ok(CountRecord {
                delay: e.delay,
                coincidences: draw(e.coincidences)?,
                singles_1: draw(e.singles_1)?,
                singles_2: draw(e.singles_2)?,
                integration_tag: tag(with_absorber).to_owned(),
            })
        })
        .collect()
}

/// Pointwise filter/mirror coincidence ratio with Poisson errors, rescaled so
/// the mean over `|τ| ≥ 20 fs` is one. Delays with zero mirror counts are
/// dropped with a warning.
pub fn ratio_normalize(filter: &[CountRecord], mirror: &[CountRecord]) -> Result<Vec<RatioPoint>> {
    if filter.len() != mirror.len() {
        return Err(Error::Contract(format!(
            "filter and mirror series differ in length ({} vs {})",
            filter.len(),
            mirror.len()
        )));
    }
    if filter.is_empty() {
        return Err(Error::Contract("empty count series".into()));
    }
    let mut raw = Vec::with_capacity(filter.len());
    for (f, m) in filter.iter().zip(mirror) {
        if (f.delay - m.delay).abs() > 1e-9 {
            return Err(Error::Contract(format!("delay grids differ ({} vs {})", f.delay, m.delay)));
        }
        if m.coincidences == 0 {
            log::warn!("dropping delay {} fs: no mirror coincidences", m.delay);
            continue;
        }
        let (nf, nm) = (f.coincidences as f64, m.coincidences as f64);
        let ratio = nf / nm;
        // an empty filter bin still carries a one-count uncertainty
        let stderr = if nf > 0.0 { ratio * (1.0 / nf + 1.0 / nm).sqrt() } else { 1.0 / nm };
        raw.push(RatioPoint { delay: f.delay, ratio, stderr });
    }
    normalize_to_baseline(raw)
}

/// Divides a ratio series by its mean over `|τ| ≥ 20 fs`.
pub fn normalize_to_baseline(mut points: Vec<RatioPoint>) -> Result<Vec<RatioPoint>> {
    let baseline: Vec<f64> =
        points.iter().filter(|p| p.delay.abs() >= BASELINE_MIN_DELAY).map(|p| p.ratio).collect();
    if baseline.is_empty() {
        return Err(Error::Contract(format!("no points with |τ| ≥ {BASELINE_MIN_DELAY} fs to normalize against")));
    }
    let mean = baseline.iter().sum::<f64>() / baseline.len() as f64;
    if !(mean > 0.0) {
        return Err(Error::Contract("baseline ratio is zero".into()));
    }
    for p in &mut points {
        p.ratio /= mean;
        p.stderr /= mean;
    }
    Ok(points)
}

/// Centred 5-point moving average; the two points at each end use the
/// truncated 3- and 4-point windows.
pub fn smooth5(series: &[f64]) -> Result<Vec<f64>> {
    let n = series.len();
    if n < 5 {
        return Err(Error::Contract(format!("5-point smoothing needs at least 5 points, got {n}")));
    }
    Ok((0..n)
        .map(|i| {
            let lo = i.saturating_sub(2);
            let hi = (i + 2).min(n - 1);
            series[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect())
}

/// [`smooth5`] applied to a ratio series, propagating independent errors.
pub fn smooth_ratio(points: &[RatioPoint]) -> Result<Vec<RatioPoint>> {
    let ratios: Vec<f64> = points.iter().map(|p| p.ratio).collect();
    let variances: Vec<f64> = points.iter().map(|p| p.stderr * p.stderr).collect();
    let smoothed = smooth5(&ratios)?;
    let n = points.len();
    Ok(points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let lo = i.saturating_sub(2);
            let hi = (i + 2).min(n - 1);
            let k = (hi - lo + 1) as f64;
            let var: f64 = variances[lo..=hi].iter().sum();
            RatioPoint { delay: p.delay, ratio: smoothed[i], stderr: var.sqrt() / k }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(lo: i32, hi: i32) -> Vec<f64> {
        (lo..=hi).map(|k| k as f64).collect()
    }

    fn record(delay: f64, c: u64) -> CountRecord {
        CountRecord { delay, coincidences: c, singles_1: 100, singles_2: 100, integration_tag: "t".into() }
    }

    #[test]
    fn synthesis_is_deterministic() {
        let p = ExperimentParams::experiment_defaults();
        let d = grid(-30, 30);
        let a = synthesize_counts(&p, &d, 1e4, true, 42).unwrap();
        let b = synthesize_counts(&p, &d, 1e4, true, 42).unwrap();
        assert_eq!(a, b);
        let c = synthesize_counts(&p, &d, 1e4, true, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn mirror_expectation_shows_hom_pairing() {
        let p = ExperimentParams::experiment_defaults().with_mode_match(0.55);
        let e = expected_counts(&p, &[0.0, 60.0], 1e6, false).unwrap();
        assert!((e[0].coincidences / e[1].coincidences - 1.55).abs() < 1e-9);
        assert_eq!(e[0].singles_1, e[1].singles_1);
    }

    #[test]
    fn poisson_counts_scatter_around_expectation() {
        let p = ExperimentParams::experiment_defaults().with_mode_match(0.55);
        let d = grid(-40, 40);
        let e = expected_counts(&p, &d, 1e6, false).unwrap();
        let s = synthesize_counts(&p, &d, 1e6, false, 7).unwrap();
        for (x, r) in e.iter().zip(&s) {
            let z = (r.coincidences as f64 - x.coincidences) / x.coincidences.sqrt();
            assert!(z.abs() < 5.0, "delay {}: z = {z}", x.delay);
        }
    }

    #[test]
    fn singles_are_delay_independent_in_expectation() {
        let p = ExperimentParams::experiment_defaults();
        let e = expected_counts(&p, &grid(-20, 20), 1e4, true).unwrap();
        assert!(e.iter().all(|x| x.singles_1.to_bits() == e[0].singles_1.to_bits()));
    }

    #[test]
    fn synthesis_contract() {
        let p = ExperimentParams::experiment_defaults();
        assert!(matches!(synthesize_counts(&p, &[0.0], 0.0, true, 1), Err(Error::Contract(_))));
        assert!(matches!(synthesize_counts(&p, &[1.0, 0.0], 10.0, true, 1), Err(Error::Contract(_))));
    }

    #[test]
    fn identical_series_normalize_to_one() {
        let s: Vec<CountRecord> = grid(-30, 30).into_iter().map(|d| record(d, 500 + d.abs() as u64)).collect();
        let r = ratio_normalize(&s, &s).unwrap();
        assert!(r.iter().all(|p| (p.ratio - 1.0).abs() < 1e-15));
        let expected = (2.0f64 / 500.0).sqrt();
        let at_zero = r.iter().find(|p| p.delay == 0.0).unwrap();
        assert!((at_zero.stderr - expected).abs() < 1e-12);
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let a: Vec<CountRecord> = grid(-30, 30).into_iter().map(|d| record(d, 10)).collect();
        let b: Vec<CountRecord> = grid(-29, 31).into_iter().map(|d| record(d, 10)).collect();
        assert!(matches!(ratio_normalize(&a, &b), Err(Error::Contract(_))));
        assert!(matches!(ratio_normalize(&a, &a[..10]), Err(Error::Contract(_))));
    }

    #[test]
    fn zero_mirror_counts_are_dropped() {
        let f: Vec<CountRecord> = grid(-25, 25).into_iter().map(|d| record(d, 10)).collect();
        let mut m = f.clone();
        m[3].coincidences = 0;
        let r = ratio_normalize(&f, &m).unwrap();
        assert_eq!(r.len(), f.len() - 1);
        assert!(r.iter().all(|p| p.delay != f[3].delay));
    }

    #[test]
    fn noiseless_ratio_recovers_theory_shape() {
        let p = ExperimentParams::experiment_defaults();
        let d = grid(-40, 40);
        let to_records = |e: Vec<ExpectedCounts>| -> Vec<(f64, f64)> {
            e.into_iter().map(|x| (x.delay, x.coincidences)).collect()
        };
        let filt = to_records(expected_counts(&p, &d, 1e4, true).unwrap());
        let mirr = to_records(expected_counts(&p, &d, 1e4, false).unwrap());
        let raw: Vec<RatioPoint> = filt
            .iter()
            .zip(&mirr)
            .map(|(f, m)| RatioPoint { delay: f.0, ratio: f.1 / m.1, stderr: 0.0 })
            .collect();
        let got = normalize_to_baseline(raw).unwrap();
        let theory = normalized_ratio_sweep(&p, &d).unwrap();
        let theory = normalize_to_baseline(
            theory.points.iter().map(|q| RatioPoint { delay: q.delay, ratio: q.ratio, stderr: 0.0 }).collect(),
        )
        .unwrap();
        for (a, b) in got.iter().zip(&theory) {
            assert!((a.ratio - b.ratio).abs() < 1e-9);
        }
    }

    #[test]
    fn smooth5_kernel() {
        assert_eq!(smooth5(&[3.0; 7]).unwrap(), vec![3.0; 7]);
        let mut impulse = vec![0.0; 9];
        impulse[4] = 1.0;
        let s = smooth5(&impulse).unwrap();
        assert_eq!(s, vec![0.0, 0.0, 0.2, 0.2, 0.2, 0.2, 0.2, 0.0, 0.0]);
        let ramp: Vec<f64> = (0..10).map(|k| 0.5 * k as f64 - 1.0).collect();
        let s = smooth5(&ramp).unwrap();
        for i in 2..8 {
            assert!((s[i] - ramp[i]).abs() < 1e-15);
        }
        // truncated windows at the ends
        assert!((s[0] - (ramp[0] + ramp[1] + ramp[2]) / 3.0).abs() < 1e-15);
        assert!((s[1] - (ramp[0] + ramp[1] + ramp[2] + ramp[3]) / 4.0).abs() < 1e-15);
        assert!(matches!(smooth5(&[1.0; 4]), Err(Error::Contract(_))));
    }

    proptest! {
        #[test]
        fn smooth5_is_linear(a in prop::collection::vec(-10.0f64..10.0, 5..40), k in -3.0f64..3.0) {
            let b: Vec<f64> = a.iter().rev().cloned().collect();
            let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| k * x + y).collect();
            let lhs = smooth5(&sum).unwrap();
            let (sa, sb) = (smooth5(&a).unwrap(), smooth5(&b).unwrap());
            for i in 0..a.len() {
                prop_assert!((lhs[i] - (k * sa[i] + sb[i])).abs() < 1e-12);
            }
        }

        #[test]
        fn smooth5_preserves_interior_mean(a in prop::collection::vec(-10.0f64..10.0, 9..60)) {
            // the centred kernel only redistributes mass; the deficit comes from the
            // two truncated windows at each end
            let n = a.len();
            let s = smooth5(&a).unwrap();
            let mean_in: f64 = a.iter().sum::<f64>() / n as f64;
            let mean_out: f64 = s.iter().sum::<f64>() / n as f64;
            let edge = 20.0 * 4.0 / n as f64;
            prop_assert!((mean_in - mean_out).abs() <= edge);
        }
    }
}
