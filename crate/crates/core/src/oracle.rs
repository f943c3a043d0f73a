//! Brute-force cross-check of the per-mode loss model.
//!
//! The continuum is replaced by `n` midpoint frequency bins. Each bin is an
//! independent bosonic mode split by the absorber into a transmitted and an
//! absorbed output mode. The two-photon output state is expanded explicitly in
//! the Fock basis of the `2n` output modes and its probabilities are summed per
//! channel class. Partial mode match μ is a mixture of an indistinguishable pair
//! (weight μ) and a pair carrying orthogonal spatial labels (weight 1 − μ),
//! each weighted by its post-selection norm. No quadrature and no closed forms.

use crate::exchange::{outcome_distribution, ExperimentParams, OutcomeDistribution};
use crate::medium::AbsorberLine;
use crate::spectra::JointSpectralAmplitude;
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest tolerated relative norm deficit of the sampled amplitude.
pub const MAX_NORM_DEFICIT: f64 = 1e-3;

/// Frequency-binned two-photon amplitude with per-bin absorption.
#[derive(Debug, Clone)]
pub struct DiscreteModel {
    pub omega_grid: Vec<f64>,
    pub bin_width: f64,
    /// Row-major `n × n`, normalized so that `Σ|F_ij|² = 1`.
    pub amplitude_matrix: Vec<Complex64>,
    pub g_values: Vec<f64>,
    pub mode_match: f64,
}

impl DiscreteModel {
    pub fn n_bins(&self) -> usize {
        self.omega_grid.len()
    }

    pub fn amplitude(&self, i: usize, j: usize) -> Complex64 {
        self.amplitude_matrix[i * self.n_bins() + j]
    }

    pub fn with_mode_match(mut self, mode_match: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mode_match) {
            return Err(Error::Domain(format!("mode match must lie in [0, 1], got {mode_match}")));
        }
        self.mode_match = mode_match;
        Ok(self)
    }

    /// `Σ Re F*_ij F_ji`.
    pub fn upsilon_grid(&self) -> f64 {
        let n = self.n_bins();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.amplitude(i, j).conj() * self.amplitude(j, i)).re;
            }
        }
        acc
    }

    /// Norm of `Σ F_ij a†_i a†_j |0⟩` from its Fock-basis amplitudes.
    pub fn symmetrized_norm(&self) -> f64 {
        let n = self.n_bins();
        let mut acc = 0.0;
        for i in 0..n {
            acc += 2.0 * self.amplitude(i, i).norm_sqr();
            for j in i + 1..n {
                acc += (self.amplitude(i, j) + self.amplitude(j, i)).norm_sqr();
            }
        }
        acc
    }
}

/// Samples a joint amplitude on `n_bins` midpoint bins spanning
/// `± window_sigmas` marginal widths.
pub fn discretize(
    jsa: &JointSpectralAmplitude,
    line: &AbsorberLine,
    n_bins: usize,
    window_sigmas: f64,
) -> Result<DiscreteModel> {
    if n_bins < 16 {
        return Err(Error::Contract(format!("oracle needs at least 16 bins, got {n_bins}")));
    }
    if !(window_sigmas > 0.0) {
        return Err(Error::Contract(format!("window must be positive, got {window_sigmas}")));
    }
    let (ma, mb) = jsa.marginal_amplitudes();
    let center = match jsa {
        JointSpectralAmplitude::Product { .. } => 0.5 * (ma.center_omega() + mb.center_omega()),
        // grid symmetric about ω_p/2 so that ω_i + ω_{n−1−i} = ω_p
        JointSpectralAmplitude::Anticorrelated(j) => 0.5 * j.pump_center_omega(),
    };
    let spread = (ma.center_omega() - center).abs().max((mb.center_omega() - center).abs());
    let half = window_sigmas * jsa.marginal_sigma() + spread;
    let bin_width = 2.0 * half / n_bins as f64;
    let omega_grid: Vec<f64> = (0..n_bins).map(|i| center - half + (i as f64 + 0.5) * bin_width).collect();

    let mut amps = vec![Complex64::new(0.0, 0.0); n_bins * n_bins];
    match jsa {
        JointSpectralAmplitude::Product { photon_a, photon_b } => {
            let root = bin_width.sqrt();
            let a: Vec<Complex64> = omega_grid.iter().map(|&w| photon_a.eval(w) * root).collect();
            let b: Vec<Complex64> = omega_grid.iter().map(|&w| photon_b.eval(w) * root).collect();
            let na: f64 = a.iter().map(|z| z.norm_sqr()).sum();
            let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
            check_deficit((na - 1.0).abs().max((nb - 1.0).abs()))?;
            let scale = 1.0 / (na * nb).sqrt();
            for i in 0..n_bins {
                for j in 0..n_bins {
                    amps[i * n_bins + j] = a[i] * b[j] * scale;
                }
            }
        }
        JointSpectralAmplitude::Anticorrelated(j) if j.is_delta_correlated() => {
            let root = bin_width.sqrt();
            for (i, &w) in omega_grid.iter().enumerate() {
                amps[i * n_bins + (n_bins - 1 - i)] = j.line_amplitude(w) * root;
            }
            renormalize(&mut amps)?;
        }
        JointSpectralAmplitude::Anticorrelated(j) => {
            for (i, &w1) in omega_grid.iter().enumerate() {
                for (k, &w2) in omega_grid.iter().enumerate() {
                    amps[i * n_bins + k] = j.amplitude(w1, w2) * bin_width;
                }
            }
            renormalize(&mut amps)?;
        }
    }

    Ok(DiscreteModel {
        g_values: omega_grid.iter().map(|&w| line.absorption(w)).collect(),
        omega_grid,
        bin_width,
        amplitude_matrix: amps,
        mode_match: 1.0,
    })
}

fn check_deficit(deficit: f64) -> Result<()> {
    if deficit > MAX_NORM_DEFICIT || !deficit.is_finite() {
        return Err(Error::Resolution { deficit });
    }
    Ok(())
}

fn renormalize(amps: &mut [Complex64]) -> Result<()> {
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    check_deficit((norm - 1.0).abs())?;
    let scale = norm.powf(-0.5);
    amps.iter_mut().for_each(|z| *z *= scale);
    Ok(())
}

/// Unnormalized channel weights `[both transmitted, one absorbed, both absorbed]`.
type ChannelSums = [f64; 3];

fn class_of(p: usize, q: usize, n: usize) -> usize {
    (p >= n) as usize + (q >= n) as usize
}

/// Indistinguishable pair: explicit Fock-basis expansion of the output state.
fn indistinguishable_sums(model: &DiscreteModel) -> ChannelSums {
    let n = model.n_bins();
    let m = 2 * n;
    let t: Vec<f64> = model.g_values.iter().map(|g| (1.0 - g).max(0.0).sqrt()).collect();
    let r: Vec<f64> = model.g_values.iter().map(|g| g.sqrt()).collect();

    // coefficient of a†_p a†_q in the output creation polynomial
    let mut poly = vec![Complex64::new(0.0, 0.0); m * m];
    for i in 0..n {
        let branches_i = [(i, t[i]), (n + i, r[i])];
        for j in 0..n {
            let f = model.amplitude(i, j);
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            let branches_j = [(j, t[j]), (n + j, r[j])];
            for &(p, up) in &branches_i {
                for &(q, uq) in &branches_j {
                    poly[p * m + q] += f * (up * uq);
                }
            }
        }
    }

    let mut sums = [0.0; 3];
    for p in 0..m {
        // a†_p a†_p |0⟩ = √2 |2_p⟩
        sums[class_of(p, p, n)] += 2.0 * poly[p * m + p].norm_sqr();
        for q in p + 1..m {
            sums[class_of(p, q, n)] += (poly[p * m + q] + poly[q * m + p]).norm_sqr();
        }
    }
    sums
}

/// Pair with orthogonal labels: each photon splits independently.
fn distinguishable_sums(model: &DiscreteModel) -> ChannelSums {
    let n = model.n_bins();
    let mut sums = [0.0; 3];
    for i in 0..n {
        let (ti, gi) = (1.0 - model.g_values[i], model.g_values[i]);
        for j in 0..n {
            let w = model.amplitude(i, j).norm_sqr();
            if w == 0.0 {
                continue;
            }
            let (tj, gj) = (1.0 - model.g_values[j], model.g_values[j]);
            sums[0] += w * ti * tj;
            sums[1] += w * (ti * gj + gi * tj);
            sums[2] += w * gi * gj;
        }
    }
    sums
}

/// Exact channel probabilities of the discretized model.
pub fn brute_force_outcomes(model: &DiscreteModel) -> OutcomeDistribution {
    let mu = model.mode_match;
    let ind = if mu > 0.0 { indistinguishable_sums(model) } else { [0.0; 3] };
    let dis = if mu < 1.0 { distinguishable_sums(model) } else { [0.0; 3] };
    let mixed: Vec<f64> = (0..3).map(|k| mu * ind[k] + (1.0 - mu) * dis[k]).collect();
    let total: f64 = mixed.iter().sum();
    OutcomeDistribution {
        both_transmitted: mixed[0] / total,
        one_absorbed: mixed[1] / total,
        both_absorbed: mixed[2] / total,
    }
}

/// Sampling window of [`compare_with_model`], in marginal widths.
pub const COMPARISON_WINDOW_SIGMAS: f64 = 8.0;

/// Loss-model and brute-force channel probabilities at one delay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub delay: f64,
    pub exchange: OutcomeDistribution,
    pub oracle: OutcomeDistribution,
    pub max_abs_diff: f64,
}

/// Runs both models at each delay on an `n_bins` grid.
pub fn compare_with_model(params: &ExperimentParams, delays: &[f64], n_bins: usize) -> Result<Vec<OracleComparison>> {
    params.validate()?;
    delays
        .par_iter()
        .map(|&delay| {
            let jsa = params.jsa(delay)?;
            let exchange = outcome_distribution(&jsa, &params.absorber, params.mode_match)?;
            let model = discretize(&jsa, &params.absorber, n_bins, COMPARISON_WINDOW_SIGMAS)?
                .with_mode_match(params.mode_match)?;
            let oracle = brute_force_outcomes(&model);
            Ok(OracleComparison { delay, exchange, oracle, max_abs_diff: exchange.max_abs_diff(&oracle) })
        })
        .collect()
}
