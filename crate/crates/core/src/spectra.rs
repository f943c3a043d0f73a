//! Single-photon spectral amplitudes and two-photon joint spectral amplitudes.

use crate::numerics::{integrate_1d, integrate_1d_vec, integrate_2d_vec, QuadratureSpec};
use crate::units::{fwhm_per_sigma, wavelength_to_angular};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Gaussian single-photon amplitude
/// `f(ω) = (2πσ²)^{-1/4} exp(−(ω−ω₀)²/(4σ²)) e^{iωτ}`,
/// so that `|f|²` is a unit normal density with standard deviation σ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralAmplitude {
    center_omega: f64,
    sigma_intensity: f64,
    delay: f64,
    amplitude_scale: f64,
}

impl SpectralAmplitude {
    pub fn new(center_omega: f64, sigma_intensity: f64, delay: f64) -> Result<Self> {
        if !(center_omega > 0.0) || !center_omega.is_finite() {
            return Err(Error::Domain(format!("centre frequency must be positive, got {center_omega}")));
        }
        if !(sigma_intensity > 0.0) || !sigma_intensity.is_finite() {
            return Err(Error::Domain(format!("spectral width must be positive, got {sigma_intensity}")));
        }
        if !delay.is_finite() {
            return Err(Error::Domain(format!("delay must be finite, got {delay}")));
        }
        Ok(Self {
            center_omega,
            sigma_intensity,
            delay,
            amplitude_scale: (2.0 * PI * sigma_intensity * sigma_intensity).powf(-0.25),
        })
    }

    pub fn center_omega(&self) -> f64 {
        self.center_omega
    }

    pub fn sigma_intensity(&self) -> f64 {
        self.sigma_intensity
    }

    pub fn delay(&self) -> f64 {
        self.delay
    }

    pub fn amplitude_scale(&self) -> f64 {
        self.amplitude_scale
    }

    pub fn with_delay(&self, delay: f64) -> Self {
        Self { delay, ..*self }
    }

    pub fn with_center(&self, center_omega: f64) -> Result<Self> {
        Self::new(center_omega, self.sigma_intensity, self.delay)
    }

    /// `|f(ω)|`, independent of the delay.
    pub fn modulus(&self, omega: f64) -> f64 {
        let u = omega - self.center_omega;
        self.amplitude_scale * (-u * u / (4.0 * self.sigma_intensity * self.sigma_intensity)).exp()
    }

    pub fn intensity(&self, omega: f64) -> f64 {
        self.modulus(omega).powi(2)
    }

    pub fn eval(&self, omega: f64) -> Complex64 {
        Complex64::from_polar(self.modulus(omega), omega * self.delay)
    }
}

/// Gaussian amplitude from a centre wavelength and intensity FWHM (nm) and a delay (fs).
pub fn gaussian_amplitude(center_nm: f64, fwhm_nm: f64, delay_fs: f64) -> Result<SpectralAmplitude> {
    if !(fwhm_nm > 0.0) {
        return Err(Error::Domain(format!("photon FWHM must be positive, got {fwhm_nm}")));
    }
    let (center, sigma) = wavelength_to_angular(center_nm, fwhm_nm)?;
    SpectralAmplitude::new(center, sigma, delay_fs)
}

/// Integration window covering both amplitudes.
fn pair_window(a: &SpectralAmplitude, b: &SpectralAmplitude, spec: &QuadratureSpec) -> (f64, f64) {
    let center = 0.5 * (a.center_omega + b.center_omega);
    let offset = (a.center_omega - b.center_omega).abs();
    let scale = a.sigma_intensity.max(b.sigma_intensity) + 0.5 * offset / spec.range_sigmas;
    (center, scale)
}

/// `∫ w(ω) f_A*(ω) f_B(ω) dω` with the common carrier `e^{iω̄(τ_B−τ_A)}` removed,
/// ω̄ being the mean of the two centres. The modulus is unaffected by the
/// carrier removal.
pub fn weighted_overlap<W>(
    a: &SpectralAmplitude,
    b: &SpectralAmplitude,
    weight: W,
    spec: &QuadratureSpec,
) -> Result<Complex64>
where
    W: Fn(f64) -> f64,
{
    let (center, scale) = pair_window(a, b, spec);
    let dt = b.delay - a.delay;
    integrate_1d(
        |w| Complex64::from_polar(weight(w) * a.modulus(w) * b.modulus(w), (w - center) * dt),
        center,
        scale,
        spec,
    )
}

/// `υ = |∫ f_A* f_B dω|²`.
pub fn overlap_upsilon(f_a: &SpectralAmplitude, f_b: &SpectralAmplitude) -> Result<f64> {
    let c = weighted_overlap(f_a, f_b, |_| 1.0, &QuadratureSpec::default())?;
    Ok(c.norm_sqr().min(1.0))
}

/// `N(A,B) = (1 + υ)^{-1/2}`.
pub fn normalization_constant(f_a: &SpectralAmplitude, f_b: &SpectralAmplitude) -> Result<f64> {
    Ok((1.0 + overlap_upsilon(f_a, f_b)?).powf(-0.5))
}

/// Frequency-anticorrelated joint amplitude
/// `F(ω,ω′) ∝ α(ω+ω′−ω_p) |v_A(ω)| |v_B(ω′)| e^{i(ω−ω′)τ/2}`
/// with a Gaussian pump envelope α of intensity standard deviation `pump_sigma`.
/// `pump_sigma == 0` is the strictly δ-correlated limit, stored as the
/// amplitude along the line `ω′ = ω_p − ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnticorrelatedJsa {
    marginal_a: SpectralAmplitude,
    marginal_b: SpectralAmplitude,
    pump_center_omega: f64,
    pump_sigma: f64,
    delay: f64,
    scale: f64,
}

impl AnticorrelatedJsa {
    pub fn new(
        marginal_a: SpectralAmplitude,
        marginal_b: SpectralAmplitude,
        pump_center_omega: f64,
        pump_fwhm: f64,
        delay: f64,
    ) -> Result<Self> {
        if !(pump_fwhm >= 0.0) {
            return Err(Error::Domain(format!("pump FWHM must be non-negative, got {pump_fwhm}")));
        }
        if !(pump_center_omega > 0.0) || !pump_center_omega.is_finite() {
            return Err(Error::Domain(format!("pump centre must be positive, got {pump_center_omega}")));
        }
        if !delay.is_finite() {
            return Err(Error::Domain(format!("delay must be finite, got {delay}")));
        }
        let mut jsa = Self {
            marginal_a: marginal_a.with_delay(0.0),
            marginal_b: marginal_b.with_delay(0.0),
            pump_center_omega,
            pump_sigma: pump_fwhm / fwhm_per_sigma(),
            delay,
            scale: 1.0,
        };
        let spec = QuadratureSpec::default();
        let norm = if jsa.is_delta_correlated() {
            let (c, s) = jsa.line_window(&spec);
            integrate_1d_vec(|w| [jsa.line_amplitude(w).norm_sqr()], c.0, s, &spec)?[0]
        } else {
            let (c, s) = jsa.rotated_window(&spec);
            0.5 * integrate_2d_vec(
                |sum, diff| {
                    let (w1, w2) = jsa.unrotate(sum, diff);
                    [jsa.amplitude(w1, w2).norm_sqr()]
                },
                c,
                s,
                &spec,
            )?[0]
        };
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InconsistentState(format!(
                "joint amplitude has non-positive norm {norm}; pump and marginals do not overlap"
            )));
        }
        jsa.scale = norm.powf(-0.5);
        Ok(jsa)
    }

    pub fn is_delta_correlated(&self) -> bool {
        self.pump_sigma == 0.0
    }

    pub fn pump_sigma(&self) -> f64 {
        self.pump_sigma
    }

    pub fn pump_center_omega(&self) -> f64 {
        self.pump_center_omega
    }

    pub fn delay(&self) -> f64 {
        self.delay
    }

    pub fn marginals(&self) -> (&SpectralAmplitude, &SpectralAmplitude) {
        (&self.marginal_a, &self.marginal_b)
    }

    pub fn with_delay(&self, delay: f64) -> Self {
        Self { delay, ..*self }
    }

    /// Two-dimensional amplitude. Only meaningful for a finite pump width.
    pub fn amplitude(&self, w1: f64, w2: f64) -> Complex64 {
        let s = w1 + w2 - self.pump_center_omega;
        let pump = if self.pump_sigma.is_infinite() {
            1.0
        } else {
            (-s * s / (4.0 * self.pump_sigma * self.pump_sigma)).exp()
        };
        let modulus = self.scale * pump * self.marginal_a.modulus(w1) * self.marginal_b.modulus(w2);
        Complex64::from_polar(modulus, 0.5 * (w1 - w2) * self.delay)
    }

    /// δ-limit amplitude along `ω′ = ω_p − ω`, parameterised by ω.
    pub fn line_amplitude(&self, w: f64) -> Complex64 {
        let partner = self.pump_center_omega - w;
        let modulus = self.scale * self.marginal_a.modulus(w) * self.marginal_b.modulus(partner);
        Complex64::from_polar(modulus, (w - 0.5 * self.pump_center_omega) * self.delay)
    }

    /// Exchanged δ-limit amplitude `F(ω′, ω)` along the same line.
    pub fn line_amplitude_swapped(&self, w: f64) -> Complex64 {
        let partner = self.pump_center_omega - w;
        let modulus = self.scale * self.marginal_a.modulus(partner) * self.marginal_b.modulus(w);
        Complex64::from_polar(modulus, -(w - 0.5 * self.pump_center_omega) * self.delay)
    }

    fn line_window(&self, spec: &QuadratureSpec) -> ((f64, f64), f64) {
        let (a, b) = (&self.marginal_a, &self.marginal_b);
        let pa = 1.0 / a.sigma_intensity().powi(2);
        let pb = 1.0 / b.sigma_intensity().powi(2);
        let center = (a.center_omega() * pa + (self.pump_center_omega - b.center_omega()) * pb) / (pa + pb);
        let mirrored = self.pump_center_omega - center;
        let std = (pa + pb).powf(-0.5);
        let mid = 0.5 * (center + mirrored);
        ((mid, mid), std + 0.5 * (center - mirrored).abs() / spec.range_sigmas)
    }

    fn rotated_window(&self, spec: &QuadratureSpec) -> ((f64, f64), (f64, f64)) {
        let (a, b) = (&self.marginal_a, &self.marginal_b);
        let var_m = a.sigma_intensity().powi(2) + b.sigma_intensity().powi(2);
        let inv_pump = if self.pump_sigma.is_infinite() { 0.0 } else { self.pump_sigma.powi(-2) };
        let s_scale = (inv_pump + 1.0 / var_m).powf(-0.5);
        let s_marg = a.center_omega() + b.center_omega() - self.pump_center_omega;
        let s_center = s_marg * (1.0 / var_m) / (inv_pump + 1.0 / var_m);
        let d_center = a.center_omega() - b.center_omega();
        let d_scale = var_m.sqrt() + 0.5 * d_center.abs() / spec.range_sigmas;
        ((s_center, 0.0), (s_scale, d_scale))
    }

    fn unrotate(&self, sum: f64, diff: f64) -> (f64, f64) {
        let total = self.pump_center_omega + sum;
        (0.5 * (total + diff), 0.5 * (total - diff))
    }
}

/// Two-photon joint spectral amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JointSpectralAmplitude {
    /// `F(ω,ω′) = f_A(ω) f_B(ω′)`; no frequency correlations.
    Product { photon_a: SpectralAmplitude, photon_b: SpectralAmplitude },
    /// Frequencies summing to the pump frequency within the pump bandwidth.
    Anticorrelated(AnticorrelatedJsa),
}

pub fn product_jsa(f_a: SpectralAmplitude, f_b: SpectralAmplitude) -> JointSpectralAmplitude {
    JointSpectralAmplitude::Product { photon_a: f_a, photon_b: f_b }
}

/// Anticorrelated joint amplitude with identical marginals. `pump_fwhm` is an
/// intensity FWHM in rad/fs; zero selects the δ-correlated limit.
pub fn anticorrelated_jsa(
    marginal: SpectralAmplitude,
    pump_center: f64,
    pump_fwhm: f64,
    delay: f64,
) -> Result<JointSpectralAmplitude> {
    Ok(JointSpectralAmplitude::Anticorrelated(AnticorrelatedJsa::new(
        marginal, marginal, pump_center, pump_fwhm, delay,
    )?))
}

impl JointSpectralAmplitude {
    /// Relative delay between the photons, τ_B − τ_A for the product kind.
    pub fn delay(&self) -> f64 {
        match self {
            Self::Product { photon_a, photon_b } => photon_b.delay() - photon_a.delay(),
            Self::Anticorrelated(j) => j.delay(),
        }
    }

    /// Same amplitude with relative delay τ, split symmetrically (∓τ/2) for the product kind.
    pub fn with_delay(&self, delay: f64) -> Self {
        match self {
            Self::Product { photon_a, photon_b } => Self::Product {
                photon_a: photon_a.with_delay(-0.5 * delay),
                photon_b: photon_b.with_delay(0.5 * delay),
            },
            Self::Anticorrelated(j) => Self::Anticorrelated(j.with_delay(delay)),
        }
    }

    /// Spectral width of the broader marginal, used to size integration windows.
    pub fn marginal_sigma(&self) -> f64 {
        let (a, b) = self.marginal_amplitudes();
        a.sigma_intensity().max(b.sigma_intensity())
    }

    pub fn marginal_amplitudes(&self) -> (&SpectralAmplitude, &SpectralAmplitude) {
        match self {
            Self::Product { photon_a, photon_b } => (photon_a, photon_b),
            Self::Anticorrelated(j) => j.marginals(),
        }
    }

    pub fn is_delta_correlated(&self) -> bool {
        matches!(self, Self::Anticorrelated(j) if j.is_delta_correlated())
    }

    /// `F(ω, ω′)`. For the δ-correlated kind this is `None`: the amplitude is a
    /// distribution supported on `ω + ω′ = ω_p`.
    pub fn amplitude(&self, w1: f64, w2: f64) -> Option<Complex64> {
        match self {
            Self::Product { photon_a, photon_b } => Some(photon_a.eval(w1) * photon_b.eval(w2)),
            Self::Anticorrelated(j) if j.is_delta_correlated() => None,
            Self::Anticorrelated(j) => Some(j.amplitude(w1, w2)),
        }
    }

    /// Integrates `f(ω, ω′, F(ω,ω′), F(ω′,ω))` over the two-photon frequency plane.
    ///
    /// The product kind uses a box around the two centres; the anticorrelated
    /// kind uses coordinates along and across the `ω+ω′ = ω_p` diagonal; the
    /// δ-correlated kind reduces to a single integral along that diagonal.
    pub fn integrate_pair<const N: usize, F>(&self, f: F, spec: &QuadratureSpec) -> Result<[f64; N]>
    where
        F: Fn(f64, f64, Complex64, Complex64) -> [f64; N],
    {
        match self {
            Self::Product { photon_a, photon_b } => {
                let centers = (photon_a.center_omega(), photon_b.center_omega());
                let scales = (photon_a.sigma_intensity(), photon_b.sigma_intensity());
                integrate_2d_vec(
                    |w1, w2| {
                        let direct = photon_a.eval(w1) * photon_b.eval(w2);
                        let swapped = photon_a.eval(w2) * photon_b.eval(w1);
                        f(w1, w2, direct, swapped)
                    },
                    centers,
                    scales,
                    spec,
                )
            }
            Self::Anticorrelated(j) if j.is_delta_correlated() => {
                let (c, s) = j.line_window(spec);
                integrate_1d_vec(
                    |w| f(w, j.pump_center_omega - w, j.line_amplitude(w), j.line_amplitude_swapped(w)),
                    c.0,
                    s,
                    spec,
                )
            }
            Self::Anticorrelated(j) => {
                let (c, s) = j.rotated_window(spec);
                let mut v = integrate_2d_vec(
                    |sum, diff| {
                        let (w1, w2) = j.unrotate(sum, diff);
                        f(w1, w2, j.amplitude(w1, w2), j.amplitude(w2, w1))
                    },
                    c,
                    s,
                    spec,
                )?;
                // dω dω′ = ½ ds dd
                v.iter_mut().for_each(|x| *x *= 0.5);
                Ok(v)
            }
        }
    }

    /// `∬ (|F(ω,ω′)|² + Re[F*(ω,ω′) F(ω′,ω)]) dω dω′`, equal to `1 + υ` for a
    /// normalized product amplitude.
    pub fn symmetrized_norm(&self) -> Result<f64> {
        let [direct, exchange] = self.norm_terms(&QuadratureSpec::default())?;
        Ok(direct + exchange)
    }

    /// `[∬|F|², ∬Re F*Fᵀ]`.
    pub fn norm_terms(&self, spec: &QuadratureSpec) -> Result<[f64; 2]> {
        self.integrate_pair(|_, _, direct, swapped| [direct.norm_sqr(), (direct.conj() * swapped).re], spec)
    }

    /// Exchange overlap `Re∬F*Fᵀ / ∬|F|²`; reduces to υ for the product kind.
    pub fn exchange_overlap(&self) -> Result<f64> {
        let [direct, exchange] = self.norm_terms(&QuadratureSpec::default())?;
        Ok(exchange / direct)
    }
}
