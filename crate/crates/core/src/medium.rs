//! Absorbing medium: a Gaussian absorption line acting independently on each
//! frequency mode.

use crate::units::wavelength_to_angular;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Absorption probability per frequency mode, `g(ω) = depth·exp(−(ω−ω₀)²/(2σ_g²))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsorberLine {
    pub center_omega: f64,
    pub sigma_g: f64,
    pub depth: f64,
}

impl AbsorberLine {
    pub fn new(center_omega: f64, sigma_g: f64, depth: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&depth) {
            return Err(Error::Domain(format!("absorber depth must lie in [0, 1], got {depth}")));
        }
        if !(sigma_g > 0.0) || !sigma_g.is_finite() {
            return Err(Error::Domain(format!("absorber width must be positive, got {sigma_g}")));
        }
        if !(center_omega > 0.0) || !center_omega.is_finite() {
            return Err(Error::Domain(format!("absorber centre must be positive, got {center_omega}")));
        }
        Ok(Self { center_omega, sigma_g, depth })
    }

    /// A line that absorbs nothing.
    pub fn transparent(center_omega: f64, sigma_g: f64) -> Result<Self> {
        Self::new(center_omega, sigma_g, 0.0)
    }

    /// Same line shape with the depth multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.center_omega, self.sigma_g, self.depth * factor)
    }

    pub fn absorption(&self, omega: f64) -> f64 {
        if self.depth == 0.0 {
            return 0.0;
        }
        let u = (omega - self.center_omega) / self.sigma_g;
        self.depth * (-0.5 * u * u).exp()
    }

    pub fn transmission(&self, omega: f64) -> f64 {
        amplitude_transmission(self, omega)
    }
}

/// Gaussian line from a centre wavelength, FWHM (both nm) and peak depth.
pub fn gaussian_line(center_nm: f64, fwhm_nm: f64, depth: f64) -> Result<AbsorberLine> {
    if !(fwhm_nm > 0.0) {
        return Err(Error::Domain(format!("absorber FWHM must be positive, got {fwhm_nm}")));
    }
    let (center, sigma) = wavelength_to_angular(center_nm, fwhm_nm)?;
    AbsorberLine::new(center, sigma, depth)
}

/// Amplitude transmission `t(ω) = √(1 − g(ω))`; the absorbed channel carries `√g(ω)`.
pub fn amplitude_transmission(line: &AbsorberLine, omega: f64) -> f64 {
    (1.0 - line.absorption(omega)).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::fwhm_per_sigma;

    #[test]
    fn peak_and_half_maximum() {
        let line = gaussian_line(810.0, 10.0, 1.0).unwrap();
        assert!((line.absorption(line.center_omega) - 1.0).abs() < 1e-15);
        let half = 0.5 * fwhm_per_sigma() * line.sigma_g;
        assert!((half - 0.014_355).abs() < 1e-6);
        assert!((line.absorption(line.center_omega + half) - 0.5).abs() < 1e-12);
        assert!((line.absorption(line.center_omega - half) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_depth_is_transparent() {
        let line = gaussian_line(810.0, 10.0, 0.0).unwrap();
        for k in -10..=10 {
            let w = line.center_omega + 0.01 * k as f64;
            assert_eq!(line.absorption(w), 0.0);
            assert_eq!(line.transmission(w), 1.0);
        }
    }

    #[test]
    fn transmission_values() {
        let line = AbsorberLine::new(2.0, 0.1, 1.0).unwrap();
        assert_eq!(amplitude_transmission(&line, 2.0), 0.0);
        let half = AbsorberLine::new(2.0, 0.1, 0.5).unwrap();
        assert!((amplitude_transmission(&half, 2.0) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-7);
    }

    #[test]
    fn partition_identity() {
        for depth in [0.0, 0.25, 0.5, 0.9, 1.0] {
            let line = gaussian_line(810.0, 10.0, depth).unwrap();
            for k in -200..=200 {
                let w = line.center_omega + 1e-3 * k as f64;
                let t = line.transmission(w);
                assert!((t * t + line.absorption(w) - 1.0).abs() < 4.0 * f64::EPSILON);
            }
        }
    }

    #[test]
    fn decays_far_from_centre() {
        let line = gaussian_line(810.0, 10.0, 1.0).unwrap();
        assert!(line.absorption(line.center_omega + 20.0 * line.sigma_g) < 1e-80);
    }

    #[test]
    fn rejects_bad_depth() {
        assert!(matches!(gaussian_line(810.0, 10.0, 1.5), Err(Error::Domain(_))));
        assert!(matches!(gaussian_line(810.0, 10.0, -0.1), Err(Error::Domain(_))));
        assert!(matches!(gaussian_line(810.0, 0.0, 0.5), Err(Error::Domain(_))));
    }
}
