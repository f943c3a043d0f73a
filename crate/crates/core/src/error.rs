use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical parameter is outside its domain (negative width, depth > 1, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A caller-side precondition was violated (grids, references, series length).
    #[error("contract error: {0}")]
    Contract(String),

    /// Adaptive quadrature ran out of subdivisions.
    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    Quadrature { estimate: f64, error_bound: f64 },

    /// The absorption-weighted overlap has a vanishing denominator.
    #[error("xi is undefined: single-photon absorption probability is zero")]
    UndefinedXi,

    /// A joint amplitude does not carry the normalization it claims.
    #[error("inconsistent two-photon state: {0}")]
    InconsistentState(String),

    /// Discretization too coarse or window too narrow for the oracle grid.
    #[error("insufficient grid resolution: norm deficit {deficit:e}")]
    Resolution { deficit: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. } | Error::InconsistentState(_) | Error::Resolution { .. }
        )
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
