//! Photon-exchange effects on photon-pair transmission through a narrow absorber.
//!
//! The crate is organised bottom-up:
//!
//! - [`units`]: wavelength/angular-frequency conversions (rad/fs, fs, nm).
//! - [`numerics`]: adaptive Gauss–Kronrod quadrature in one and two dimensions.
//! - [`spectra`]: single-photon spectral amplitudes and two-photon joint amplitudes.
//! - [`medium`]: absorption line shape and per-mode amplitude transmission.
//! - [`exchange`]: overlap quantities, pair-absorption probabilities, the per-mode
//!   loss model, the coincidence density and normalized delay sweeps.
//! - [`oracle`]: a discretized Fock-space model used to cross-check [`exchange`].
//! - [`pipeline`]: synthetic coincidence counts and the analysis chain applied to them.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod exchange;
pub mod medium;
pub mod numerics;
pub mod oracle;
pub mod pipeline;
pub mod spectra;
pub mod units;

pub use error::{Error, Result};
pub use exchange::{
    coincidence_density, normalized_ratio_sweep, outcome_distribution, pair_absorption_perturbative,
    pair_production_rate, single_absorption, wavefunction, xi, CoincidenceDensity, Correlation,
    DelayPoint, DelaySweepResult, ExperimentParams, OutcomeDistribution, Reference,
};
pub use medium::{amplitude_transmission, gaussian_line, AbsorberLine};
pub use numerics::QuadratureSpec;
pub use spectra::{
    anticorrelated_jsa, gaussian_amplitude, normalization_constant, overlap_upsilon, product_jsa,
    JointSpectralAmplitude, SpectralAmplitude,
};
