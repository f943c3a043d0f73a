//! Unit conversions. Internally everything is rad/fs and fs; nanometres only
//! appear at API boundaries.

use crate::{Error, Result};
use std::f64::consts::{LN_2, PI};

/// Speed of light in vacuum, nm/fs (exact).
pub const SPEED_OF_LIGHT_NM_PER_FS: f64 = 299.792458;

/// FWHM of a Gaussian divided by its standard deviation, 2√(2 ln 2).
pub fn fwhm_per_sigma() -> f64 {
    2.0 * (2.0 * LN_2).sqrt()
}

/// Converts a centre wavelength and intensity FWHM (both nm) to a centre angular
/// frequency and intensity standard deviation (both rad/fs), using the
/// linearised relation Δω = 2πc·Δλ/λ².
pub fn wavelength_to_angular(lambda_nm: f64, fwhm_nm: f64) -> Result<(f64, f64)> {
    if !(lambda_nm > 0.0) || !lambda_nm.is_finite() {
        return Err(Error::Domain(format!("wavelength must be positive, got {lambda_nm}")));
    }
    if !(fwhm_nm >= 0.0) || !fwhm_nm.is_finite() {
        return Err(Error::Domain(format!("FWHM must be non-negative, got {fwhm_nm}")));
    }
    let center = 2.0 * PI * SPEED_OF_LIGHT_NM_PER_FS / lambda_nm;
    let fwhm_omega = 2.0 * PI * SPEED_OF_LIGHT_NM_PER_FS * fwhm_nm / (lambda_nm * lambda_nm);
    Ok((center, fwhm_omega / fwhm_per_sigma()))
}

/// Inverse of [`wavelength_to_angular`] for the width: intensity std (rad/fs) at
/// a given centre wavelength back to FWHM in nm.
pub fn sigma_to_fwhm_nm(sigma: f64, lambda_nm: f64) -> Result<f64> {
    if !(lambda_nm > 0.0) {
        return Err(Error::Domain(format!("wavelength must be positive, got {lambda_nm}")));
    }
    Ok(sigma * fwhm_per_sigma() * lambda_nm * lambda_nm / (2.0 * PI * SPEED_OF_LIGHT_NM_PER_FS))
}

/// Converts an angular frequency offset (rad/fs) at a reference wavelength to nm.
pub fn omega_offset_from_nm(offset_nm: f64, lambda_nm: f64) -> Result<f64> {
    if !(lambda_nm > 0.0) {
        return Err(Error::Domain(format!("wavelength must be positive, got {lambda_nm}")));
    }
    Ok(-2.0 * PI * SPEED_OF_LIGHT_NM_PER_FS * offset_nm / (lambda_nm * lambda_nm))
}
