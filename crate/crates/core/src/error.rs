use num_complex::Complex64;
use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("accuracy target not met: achieved {achieved:.3e} ({context})")]
    Accuracy { achieved: f64, context: String },
    #[error("integration failed at x = {x}: {reason}")]
    Integration { x: f64, reason: String },
    #[error("coefficient {name} is not admissible at x = {x}")]
    Coefficient { name: &'static str, x: f64 },
    #[error("bracket limit did not converge (estimate {value}, error {estimate:.3e})")]
    LimitDivergence { value: Complex64, estimate: f64 },
    #[error("ill-conditioned construction (condition number {condition:.3e})")]
    Construction { condition: f64 },
    #[error("z = {z} is numerically in the spectrum: {reason}")]
    SpectralPoint { z: Complex64, reason: String },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("regime error: {0}")]
    Regime(String),
    #[error("truncation bound {bound:.3e} exceeds tolerance")]
    Truncation { bound: f64 },
    #[error("argument limit did not converge at lambda = {lambda}")]
    Inversion { lambda: f64, trace: Vec<f64> },
    #[error("conditioning error: {0}")]
    Conditioning(String),
    #[error("iteration did not converge: {0}")]
    Convergence(String),
    #[error("usage error: {0}")]
    Usage(String),
}

impl Error {
    /// True for errors caused by bad inputs rather than numerical trouble.
    pub fn is_parameter_error(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::Parameter(_) | Error::Regime(_) | Error::Usage(_)
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Accuracy { .. } => "accuracy",
            Error::Integration { .. } => "integration",
            Error::Coefficient { .. } => "coefficient",
            Error::LimitDivergence { .. } => "limit-divergence",
            Error::Construction { .. } => "construction",
            Error::SpectralPoint { .. } => "spectral-point",
            Error::Parameter(_) => "parameter",
            Error::Regime(_) => "regime",
            Error::Truncation { .. } => "truncation",
            Error::Inversion { .. } => "inversion",
            Error::Conditioning(_) => "conditioning",
            Error::Convergence(_) => "convergence",
            Error::Usage(_) => "usage",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
