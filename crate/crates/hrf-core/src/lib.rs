//! Function-space rectified flow toolkit.
//!
//! Everything operates on functions in `L2([a, b])` represented by their
//! values on a uniform grid with trapezoid quadrature. Gaussian measures are
//! given spectrally (eigenpairs of a covariance kernel) and sampled by
//! truncated Karhunen-Loeve expansion. Velocity fields `v(t, x)` come in four
//! flavors: a spectral-coefficient MLP, a small Fourier-layer operator, the
//! closed-form Gaussian conditional-expectation oracle, and a kernel-regression
//! oracle over an empirical coupling. The `ode` module transports samples along
//! `dz/dt = v(t, z)`, `rectify` implements the coupling-rectification operators
//! together with straightness/variance/transport-cost diagnostics, and `pfode`
//! carries the variance-preserving score machinery and its induced
//! interpolation schedule.

pub mod hilbert;
pub mod metrics;
pub mod models;
pub mod ode;
pub mod paths;
pub mod pfode;
pub mod rectify;
pub mod rng;
pub mod stats;
pub mod training;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("training diverged at step {step}: {reason}")]
    TrainingDiverged { step: usize, reason: String },
    #[error("solver failure at step {step}: {reason}")]
    SolverFailure { step: usize, reason: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
