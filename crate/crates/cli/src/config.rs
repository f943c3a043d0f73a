use photon_exchange::units::{fwhm_per_sigma, omega_offset_from_nm, wavelength_to_angular};
use photon_exchange::{gaussian_amplitude, gaussian_line, Correlation, Error, ExperimentParams, Result};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Largest delay grid a run will build.
pub const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationKind {
    Product,
    Anticorrelated,
}

/// Every parameter of a run. Config files use exactly these keys; absent keys
/// take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub photon_center_nm: f64,
    pub photon_fwhm_nm: f64,
    pub absorber_center_nm: f64,
    pub absorber_fwhm_nm: f64,
    pub absorber_depth: f64,
    pub mode_match: f64,
    pub center_mismatch_nm: f64,
    pub correlation_kind: CorrelationKind,
    /// Pump intensity FWHM at half the photon wavelength; 0 is a monochromatic pump.
    pub pump_fwhm_nm: f64,
    pub delay_min_fs: f64,
    pub delay_max_fs: f64,
    pub delay_step_fs: f64,
    pub seed: u64,
    /// Output file (`synth`: file stem); standard output when absent.
    pub output_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            photon_center_nm: 810.0,
            photon_fwhm_nm: 129.0,
            absorber_center_nm: 810.0,
            absorber_fwhm_nm: 10.0,
            absorber_depth: 1.0,
            mode_match: 1.0,
            center_mismatch_nm: 0.0,
            correlation_kind: CorrelationKind::Product,
            pump_fwhm_nm: 0.0,
            delay_min_fs: -60.0,
            delay_max_fs: 60.0,
            delay_step_fs: 0.5,
            seed: 42,
            output_path: None,
        }
    }
}

/// Parses and validates a JSON config document.
pub fn parse_config(bytes: &[u8]) -> Result<RunConfig> {
    let config: RunConfig = serde_json::from_slice(bytes)?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.delays()?;
        self.params()?;
        Ok(())
    }

    /// `delay_min + k·step` up to `delay_max` inclusive.
    pub fn delays(&self) -> Result<Vec<f64>> {
        let (lo, hi, step) = (self.delay_min_fs, self.delay_max_fs, self.delay_step_fs);
        if !(lo.is_finite() && hi.is_finite() && step.is_finite()) || !(step > 0.0) || !(hi >= lo) {
            return Err(Error::Contract(format!("ill-formed delay grid {lo}..{hi} step {step}")));
        }
        let span = (hi - lo) / step;
        if span >= MAX_GRID_POINTS as f64 {
            return Err(Error::Contract(format!("delay grid exceeds {MAX_GRID_POINTS} points")));
        }
        let n = (span + 1e-9).floor() as usize;
        Ok((0..=n).map(|k| lo + k as f64 * step).collect())
    }

    pub fn pump_fwhm_omega(&self) -> Result<f64> {
        if self.pump_fwhm_nm == 0.0 {
            return Ok(0.0);
        }
        let (_, sigma) = wavelength_to_angular(0.5 * self.photon_center_nm, self.pump_fwhm_nm)?;
        Ok(sigma * fwhm_per_sigma())
    }

    pub fn correlation(&self) -> Result<Correlation> {
        Ok(match self.correlation_kind {
            CorrelationKind::Product => Correlation::Product,
            CorrelationKind::Anticorrelated => Correlation::Anticorrelated { pump_fwhm: self.pump_fwhm_omega()? },
        })
    }

    pub fn params(&self) -> Result<ExperimentParams> {
        let params = ExperimentParams {
            photon: gaussian_amplitude(self.photon_center_nm, self.photon_fwhm_nm, 0.0)?,
            absorber: gaussian_line(self.absorber_center_nm, self.absorber_fwhm_nm, self.absorber_depth)?,
            mode_match: self.mode_match,
            center_mismatch: omega_offset_from_nm(self.center_mismatch_nm, self.photon_center_nm)?,
            correlation: self.correlation()?,
        };
        params.validate()?;
        Ok(params)
    }
}
