//! Weighted Levenberg-Marquardt fit of the mirror-run HOM peak
//! `a (1 + v exp(-σ²τ²))`.

use super::{check_increasing, CountRecord, BASELINE_MIN_DELAY};
use crate::units::sigma_to_fwhm_nm;
use crate::{Error, Result};
use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

const MAX_ITERATIONS: usize = 500;
const STEP_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    /// Single-photon intensity FWHM implied by the fitted width.
    pub fitted_fwhm_nm: f64,
    pub fwhm_stderr: f64,
    /// Peak excess `v` over the baseline.
    pub hom_enhancement: f64,
    pub hom_enhancement_stderr: f64,
    /// Width parameter σ in rad/fs.
    pub sigma: f64,
    pub baseline: f64,
    /// Square root of the weighted residual sum of squares.
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Fits the coincidence counts of a mirror run.
pub fn fit_hom_width(mirror: &[CountRecord], center_nm: f64) -> Result<FitReport> {
    let delays: Vec<f64> = mirror.iter().map(|r| r.delay).collect();
    let counts: Vec<f64> = mirror.iter().map(|r| r.coincidences as f64).collect();
    fit_hom_width_samples(&delays, &counts, center_nm)
}

fn model(p: &Vector3<f64>, tau: f64) -> (f64, Vector3<f64>) {
    let (a, v, s) = (p[0], p[1], p[2]);
    let e = (-s * s * tau * tau).exp();
    let value = a * (1.0 + v * e);
    let grad = Vector3::new(1.0 + v * e, a * e, -2.0 * a * v * s * tau * tau * e);
    (value, grad)
}

struct Normal {
    chi2: f64,
    jtj: Matrix3<f64>,
    jtr: Vector3<f64>,
}

fn normal_equations(p: &Vector3<f64>, tau: &[f64], y: &[f64], w: &[f64]) -> Normal {
    let mut out = Normal { chi2: 0.0, jtj: Matrix3::zeros(), jtr: Vector3::zeros() };
    for ((&t, &yi), &wi) in tau.iter().zip(y).zip(w) {
        let (m, g) = model(p, t);
        let r = yi - m;
        out.chi2 += wi * r * r;
        out.jtj += wi * g * g.transpose();
        out.jtr += wi * r * g;
    }
    out
}

fn initial_guess(tau: &[f64], y: &[f64]) -> Result<Vector3<f64>> {
    let span = tau.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let cut = if span >= BASELINE_MIN_DELAY { BASELINE_MIN_DELAY } else { 0.75 * span };
    let wings: Vec<f64> = tau.iter().zip(y).filter(|(t, _)| t.abs() >= cut).map(|(_, &c)| c).collect();
    let a = wings.iter().sum::<f64>() / wings.len().max(1) as f64;
    if !(a > 0.0) {
        return Err(Error::Contract("no baseline counts to fit against".into()));
    }
    let peak = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let v = (peak / a - 1.0).max(0.01);
    // second moment of the excess; exp(-σ²τ²) has variance 1/(2σ²)
    let (mut m0, mut m2) = (0.0, 0.0);
    for (&t, &c) in tau.iter().zip(y) {
        let excess = (c / a - 1.0).max(0.0);
        m0 += excess;
        m2 += excess * t * t;
    }
    let sigma = if m0 > 0.0 && m2 > 0.0 { (m0 / (2.0 * m2)).sqrt() } else { 4.0 / span.max(1.0) };
    Ok(Vector3::new(a, v, sigma))
}

/// Fits `a (1 + v exp(-σ²τ²))` to counts `y` at delays `tau`, weighting each
/// point by its Poisson variance.
pub fn fit_hom_width_samples(tau: &[f64], y: &[f64], center_nm: f64) -> Result<FitReport> {
    if tau.len() != y.len() {
        return Err(Error::Contract("delay and count arrays differ in length".into()));
    }
    if tau.len() < 4 {
        return Err(Error::Contract(format!("need at least 4 points to fit, got {}", tau.len())));
    }
    check_increasing(tau.iter().copied())?;
    if y.iter().any(|c| !c.is_finite() || *c < 0.0) {
        return Err(Error::Contract("counts must be finite and non-negative".into()));
    }
    let w: Vec<f64> = y.iter().map(|&c| 1.0 / c.max(1.0)).collect();

    let mut p = initial_guess(tau, y)?;
    let mut eq = normal_equations(&p, tau, y, &w);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut damped = eq.jtj;
        for k in 0..3 {
            damped[(k, k)] += lambda * eq.jtj[(k, k)].max(1e-300);
        }
        let Some(step) = damped.cholesky().map(|c| c.solve(&eq.jtr)) else {
            lambda *= 10.0;
            continue;
        };
        let trial = p + step;
        let trial_eq = normal_equations(&trial, tau, y, &w);
        if trial_eq.chi2.is_finite() && trial_eq.chi2 <= eq.chi2 {
            let rel = (0..3).map(|k| step[k].abs() / trial[k].abs().max(1e-300)).fold(0.0, f64::max);
            p = trial;
            eq = trial_eq;
            lambda = (lambda / 3.0).max(1e-12);
            if rel < STEP_TOLERANCE {
                converged = true;
                break;
            }
        } else {
            lambda *= 4.0;
            if lambda > 1e16 {
                // no downhill step left at machine precision
                converged = true;
                break;
            }
        }
    }

    let dof = (tau.len() - 3) as f64;
    let cov = eq.jtj.try_inverse().ok_or(Error::InconsistentState("singular fit curvature".into()))?
        * (eq.chi2 / dof);
    let sigma = p[2].abs();
    let fwhm = sigma_to_fwhm_nm(sigma, center_nm)?;
    let sigma_err = cov[(2, 2)].max(0.0).sqrt();
    Ok(FitReport {
        fitted_fwhm_nm: fwhm,
        fwhm_stderr: fwhm * sigma_err / sigma,
        hom_enhancement: p[1],
        hom_enhancement_stderr: cov[(1, 1)].max(0.0).sqrt(),
        sigma,
        baseline: p[0],
        residual_norm: eq.chi2.sqrt(),
        iterations,
        converged,
    })
}
