//! Overlap quantities, pair absorption, the per-mode loss model, the coincidence
//! density and normalized transmission-ratio sweeps.
//!
//! The absorber acts on every frequency mode as a beam splitter: amplitude
//! `t(ω) = √(1−g(ω))` stays in the beam and `√g(ω)` is absorbed. For a
//! two-photon amplitude `F` the probability of each channel assignment is
//!
//! ```text
//! P_c = ∬ W_c(ω,ω′) (|F|² + μ Re F*(ω,ω′)F(ω′,ω)) / ∬ (|F|² + μ Re F*(ω,ω′)F(ω′,ω))
//! ```
//!
//! with `W_tt = (1−g)(1−g′)`, `W_aa = g g′` and the remainder for one absorption.
//! The weights sum to one pointwise, so the channel probabilities sum to one.
//! μ scales every exchange term (spatial mode match).

use crate::medium::AbsorberLine;
use crate::numerics::{integrate_1d, integrate_1d_vec, QuadratureSpec};
use crate::spectra::{weighted_overlap, AnticorrelatedJsa, JointSpectralAmplitude, SpectralAmplitude};
use crate::units::SPEED_OF_LIGHT_NM_PER_FS;
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Two-photon frequency correlations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Correlation {
    /// Independent photon spectra.
    Product,
    /// Frequencies sum to the pump frequency; `pump_fwhm` in rad/fs, zero for the δ limit.
    Anticorrelated { pump_fwhm: f64 },
}

/// Everything needed to evaluate a delay sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentParams {
    /// Template photon; its delay is ignored.
    pub photon: SpectralAmplitude,
    pub absorber: AbsorberLine,
    /// Spatial mode overlap μ ∈ [0, 1] multiplying every exchange term.
    pub mode_match: f64,
    /// Centre-frequency offset δω (rad/fs); photon A sits at ω₀ − δω/2, B at ω₀ + δω/2.
    pub center_mismatch: f64,
    pub correlation: Correlation,
}

impl ExperimentParams {
    /// 129 nm photons and a 10 nm, depth-1 absorber, both centred at 810 nm.
    pub fn experiment_defaults() -> Self {
        Self {
            photon: crate::spectra::gaussian_amplitude(810.0, 129.0, 0.0).expect("valid photon"),
            absorber: crate::medium::gaussian_line(810.0, 10.0, 1.0).expect("valid absorber"),
            mode_match: 1.0,
            center_mismatch: 0.0,
            correlation: Correlation::Product,
        }
    }

    pub fn with_correlation(self, correlation: Correlation) -> Self {
        Self { correlation, ..self }
    }

    pub fn with_mode_match(self, mode_match: f64) -> Self {
        Self { mode_match, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        check_mode_match(self.mode_match)?;
        if !self.center_mismatch.is_finite() {
            return Err(Error::Domain("centre mismatch must be finite".into()));
        }
        if let Correlation::Anticorrelated { pump_fwhm } = self.correlation {
            if !(pump_fwhm >= 0.0) {
                return Err(Error::Domain(format!("pump FWHM must be non-negative, got {pump_fwhm}")));
            }
        }
        Ok(())
    }

    /// The two photons at relative delay τ (A at −τ/2, B at +τ/2).
    pub fn photons(&self, delay: f64) -> Result<(SpectralAmplitude, SpectralAmplitude)> {
        let w0 = self.photon.center_omega();
        let a = self.photon.with_center(w0 - 0.5 * self.center_mismatch)?.with_delay(-0.5 * delay);
        let b = self.photon.with_center(w0 + 0.5 * self.center_mismatch)?.with_delay(0.5 * delay);
        Ok((a, b))
    }

    /// Joint amplitude at relative delay τ.
    pub fn jsa(&self, delay: f64) -> Result<JointSpectralAmplitude> {
        self.validate()?;
        let (a, b) = self.photons(delay)?;
        match self.correlation {
            Correlation::Product => Ok(JointSpectralAmplitude::Product { photon_a: a, photon_b: b }),
            Correlation::Anticorrelated { pump_fwhm } => Ok(JointSpectralAmplitude::Anticorrelated(
                AnticorrelatedJsa::new(a, b, 2.0 * self.photon.center_omega(), pump_fwhm, delay)?,
            )),
        }
    }
}

fn check_mode_match(mu: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::Domain(format!("mode match must lie in [0, 1], got {mu}")));
    }
    Ok(())
}

/// Probabilities of the three channel assignments of a photon pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub both_transmitted: f64,
    pub one_absorbed: f64,
    pub both_absorbed: f64,
}

impl OutcomeDistribution {
    pub fn total(&self) -> f64 {
        self.both_transmitted + self.one_absorbed + self.both_absorbed
    }

    /// Largest componentwise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.both_transmitted - other.both_transmitted)
            .abs()
            .max((self.one_absorbed - other.one_absorbed).abs())
            .max((self.both_absorbed - other.both_absorbed).abs())
    }
}

/// Absorption-weighted moments of a two-photon amplitude.
///
/// Index order is `[1, g(ω), g(ω′), g(ω)g(ω′)]`; `direct` integrates `|F|²`
/// against those weights and `exchange` integrates `Re F*(ω,ω′)F(ω′,ω)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelIntegrals {
    pub direct: [f64; 4],
    pub exchange: [f64; 4],
}

impl ChannelIntegrals {
    /// Closed forms for a product amplitude from four one-dimensional integrals.
    pub fn product(f_a: &SpectralAmplitude, f_b: &SpectralAmplitude, line: &AbsorberLine) -> Result<Self> {
        let spec = QuadratureSpec::default();
        let center = 0.5 * (f_a.center_omega() + f_b.center_omega());
        let offset = (f_a.center_omega() - f_b.center_omega()).abs();
        let scale = f_a.sigma_intensity().max(f_b.sigma_intensity()) + 0.5 * offset / spec.range_sigmas;
        let dt = f_b.delay() - f_a.delay();
        let [c_re, c_im, cg_re, cg_im, p_a, p_b] = integrate_1d_vec(
            |w| {
                let g = line.absorption(w);
                let (ma, mb) = (f_a.modulus(w), f_b.modulus(w));
                let (s, c) = ((w - center) * dt).sin_cos();
                let m = ma * mb;
                [m * c, m * s, g * m * c, g * m * s, g * ma * ma, g * mb * mb]
            },
            center,
            scale,
            &spec,
        )?;
        let overlap = Complex64::new(c_re, c_im);
        let weighted = Complex64::new(cg_re, cg_im);
        let cross = (weighted * overlap.conj()).re;
        Ok(Self {
            direct: [1.0, p_a, p_b, p_a * p_b],
            exchange: [overlap.norm_sqr(), cross, cross, weighted.norm_sqr()],
        })
    }

    /// Direct two-dimensional integration, valid for every kind of joint amplitude.
    pub fn numeric(jsa: &JointSpectralAmplitude, line: &AbsorberLine) -> Result<Self> {
        let v = jsa.integrate_pair(
            |w1, w2, direct, swapped| {
                let d = direct.norm_sqr();
                let x = (direct.conj() * swapped).re;
                let (g1, g2) = (line.absorption(w1), line.absorption(w2));
                [d, g1 * d, g2 * d, g1 * g2 * d, x, g1 * x, g2 * x, g1 * g2 * x]
            },
            &QuadratureSpec::default(),
        )?;
        Ok(Self { direct: [v[0], v[1], v[2], v[3]], exchange: [v[4], v[5], v[6], v[7]] })
    }

    pub fn for_jsa(jsa: &JointSpectralAmplitude, line: &AbsorberLine) -> Result<Self> {
        let integrals = match jsa {
            JointSpectralAmplitude::Product { photon_a, photon_b } => Self::product(photon_a, photon_b, line)?,
            _ => Self::numeric(jsa, line)?,
        };
        if (integrals.direct[0] - 1.0).abs() > 1e-6 {
            return Err(Error::InconsistentState(format!(
                "joint amplitude norm is {} instead of 1",
                integrals.direct[0]
            )));
        }
        Ok(integrals)
    }

    /// Channel probabilities with exchange terms weighted by μ.
    pub fn outcome(&self, mu: f64) -> OutcomeDistribution {
        let (d, x) = (&self.direct, &self.exchange);
        let norm = d[0] + mu * x[0];
        let tt = (d[0] - d[1] - d[2] + d[3] + mu * (x[0] - x[1] - x[2] + x[3])) / norm;
        let aa = (d[3] + mu * x[3]) / norm;
        OutcomeDistribution { both_transmitted: tt, one_absorbed: 1.0 - tt - aa, both_absorbed: aa }
    }

    /// Channel probabilities once every exchange term has averaged away (τ → ∞).
    pub fn asymptotic_outcome(&self) -> OutcomeDistribution {
        self.outcome(0.0)
    }

    pub fn upsilon(&self) -> f64 {
        self.exchange[0] / self.direct[0]
    }

    pub fn xi(&self) -> Option<f64> {
        (self.direct[3] > 0.0).then(|| self.exchange[3] / self.direct[3])
    }

    pub fn absorption_a(&self) -> f64 {
        self.direct[1] / self.direct[0]
    }

    pub fn absorption_b(&self) -> f64 {
        self.direct[2] / self.direct[0]
    }
}

/// `P = ∫ g(ω)|f(ω)|² dω`.
pub fn single_absorption(f: &SpectralAmplitude, line: &AbsorberLine) -> Result<f64> {
    let p = integrate_1d(
        |w| (line.absorption(w) * f.intensity(w)).into(),
        f.center_omega(),
        f.sigma_intensity(),
        &QuadratureSpec::default(),
    )?;
    Ok(p.re)
}

/// `ξ = |∫ g f_A* f_B|² / (∫ g|f_A|² · ∫ g|f_B|²)`.
pub fn xi(f_a: &SpectralAmplitude, f_b: &SpectralAmplitude, line: &AbsorberLine) -> Result<f64> {
    let p_a = single_absorption(f_a, line)?;
    let p_b = single_absorption(f_b, line)?;
    if !(p_a > 0.0 && p_b > 0.0) {
        return Err(Error::UndefinedXi);
    }
    let c = weighted_overlap(f_a, f_b, |w| line.absorption(w), &QuadratureSpec::default())?;
    Ok((c.norm_sqr() / (p_a * p_b)).min(1.0))
}

/// Lowest-order pair absorption `P_AB = P_A P_B (1 + μξ)/(1 + μυ)`.
pub fn pair_absorption_perturbative(
    f_a: &SpectralAmplitude,
    f_b: &SpectralAmplitude,
    line: &AbsorberLine,
    mu: f64,
) -> Result<f64> {
    check_mode_match(mu)?;
    let p_a = single_absorption(f_a, line)?;
    let p_b = single_absorption(f_b, line)?;
    let xi = xi(f_a, f_b, line)?;
    let upsilon = crate::spectra::overlap_upsilon(f_a, f_b)?;
    Ok(p_a * p_b * (1.0 + mu * xi) / (1.0 + mu * upsilon))
}

/// Channel probabilities of the per-mode loss model.
pub fn outcome_distribution(
    jsa: &JointSpectralAmplitude,
    line: &AbsorberLine,
    mu: f64,
) -> Result<OutcomeDistribution> {
    check_mode_match(mu)?;
    Ok(ChannelIntegrals::for_jsa(jsa, line)?.outcome(mu))
}

/// Relative pair-production rate behind the post-selecting polarizer,
/// `1 + μυ`, equal to one at large delay.
pub fn pair_production_rate(f_a: &SpectralAmplitude, f_b: &SpectralAmplitude, mu: f64) -> Result<f64> {
    check_mode_match(mu)?;
    Ok(1.0 + mu * crate::spectra::overlap_upsilon(f_a, f_b)?)
}

/// Normalization point of a transmission-ratio sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", content = "delay_fs", rename_all = "snake_case")]
pub enum Reference {
    /// The τ → ∞ limit, where all exchange terms vanish.
    #[default]
    Asymptotic,
    /// A finite delay, required to satisfy |τ| ≥ 5/σ.
    Delay(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayPoint {
    pub delay: f64,
    pub upsilon: f64,
    /// `None` when the absorber absorbs nothing.
    pub xi: Option<f64>,
    pub p_a: f64,
    pub p_b: f64,
    pub outcomes: OutcomeDistribution,
    /// Filter-to-mirror pair rate, normalized at the reference.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelaySweepResult {
    pub reference: Reference,
    /// Pair transmission probability at the reference.
    pub reference_transmission: f64,
    pub points: Vec<DelayPoint>,
}

impl DelaySweepResult {
    pub fn delays(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.delay).collect()
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.ratio).collect()
    }

    /// Point with the smallest ratio.
    pub fn minimum(&self) -> Option<&DelayPoint> {
        self.points.iter().min_by(|a, b| a.ratio.total_cmp(&b.ratio))
    }
}

/// [`normalized_ratio_sweep_with`] normalized at the asymptotic limit.
pub fn normalized_ratio_sweep(params: &ExperimentParams, delays: &[f64]) -> Result<DelaySweepResult> {
    normalized_ratio_sweep_with(params, delays, Reference::Asymptotic)
}

/// Normalized pair-transmission ratio `R(τ)`.
///
/// Filter and mirror pair rates are both proportional to the produced-pair rate
/// `∝ 1 + μυ`, so their ratio is the state-normalized both-transmitted
/// probability; `R` divides that by its value at the reference.
pub fn normalized_ratio_sweep_with(
    params: &ExperimentParams,
    delays: &[f64],
    reference: Reference,
) -> Result<DelaySweepResult> {
    params.validate()?;
    if delays.is_empty() {
        return Err(Error::Contract("delay list is empty".into()));
    }
    if let Some(bad) = delays.iter().find(|d| !d.is_finite()) {
        return Err(Error::Contract(format!("non-finite delay {bad}")));
    }
    let base = params.jsa(0.0)?;
    let line = &params.absorber;
    let mu = params.mode_match;

    let reference_transmission = match reference {
        Reference::Asymptotic => ChannelIntegrals::for_jsa(&base, line)?.asymptotic_outcome().both_transmitted,
        Reference::Delay(tau) => {
            let min = 5.0 / params.photon.sigma_intensity();
            if !(tau.abs() >= min) {
                return Err(Error::Contract(format!(
                    "reference delay {tau} fs is inside the photon coherence region (need |τ| ≥ {min:.3} fs)"
                )));
            }
            ChannelIntegrals::for_jsa(&base.with_delay(tau), line)?.outcome(mu).both_transmitted
        }
    };
    if !(reference_transmission > 0.0) {
        return Err(Error::Contract("no pairs are transmitted at the reference delay".into()));
    }

    let points = delays
        .par_iter()
        .map(|&tau| {
            let ints = ChannelIntegrals::for_jsa(&base.with_delay(tau), line)?;
            let outcomes = ints.outcome(mu);
            Ok(DelayPoint {
                delay: tau,
                upsilon: ints.upsilon(),
                xi: ints.xi(),
                p_a: ints.absorption_a(),
                p_b: ints.absorption_b(),
                outcomes,
                ratio: outcomes.both_transmitted / reference_transmission,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(DelaySweepResult { reference, reference_transmission, points })
}

/// First-order photon wavefunction `ψ(z,t) = ∫ f(ω) e^{iω(z/c − t)} dω` (z in nm, t in fs).
pub fn wavefunction(f: &SpectralAmplitude, z: f64, t: f64) -> Result<Complex64> {
    let retarded = z / SPEED_OF_LIGHT_NM_PER_FS - t;
    integrate_1d(
        |w| f.eval(w) * Complex64::from_polar(1.0, w * retarded),
        f.center_omega(),
        f.sigma_intensity(),
        &QuadratureSpec::default(),
    )
}

/// Second-order coincidence density split into its independent-detection and
/// exchange parts; `total = no_exchange + exchange`, all scaled by `|N|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceDensity {
    pub total: f64,
    pub no_exchange: f64,
    pub exchange: f64,
}

pub fn coincidence_density(
    f_a: &SpectralAmplitude,
    f_b: &SpectralAmplitude,
    (z1, t1): (f64, f64),
    (z2, t2): (f64, f64),
) -> Result<CoincidenceDensity> {
    let n2 = 1.0 / (1.0 + crate::spectra::overlap_upsilon(f_a, f_b)?);
    let a1 = wavefunction(f_a, z1, t1)?;
    let a2 = wavefunction(f_a, z2, t2)?;
    let b1 = wavefunction(f_b, z1, t1)?;
    let b2 = wavefunction(f_b, z2, t2)?;
    let direct = a1.norm_sqr() * b2.norm_sqr() + a2.norm_sqr() * b1.norm_sqr();
    let exchange = 2.0 * (a1.conj() * b1 * b2.conj() * a2).re;
    Ok(CoincidenceDensity {
        total: n2 * (direct + exchange),
        no_exchange: n2 * direct,
        exchange: n2 * exchange,
    })
}
