use thiserror::Error;

/// Errors produced by state construction, channels, detectors, criteria and samplers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid temperature parameter: k = {0} (must be >= 1)")]
    InvalidTemperature(f64),

    #[error("invalid mode count: {0}")]
    InvalidSize(usize),

    #[error("covariance is not a bona-fide quantum state (min eigenvalue of cov + i*Omega = {min_eig:e})")]
    NotBonaFide { min_eig: f64 },

    #[error("covariance is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("ordering too high: sigma - t is not positive definite (min eigenvalue {min_eig:e})")]
    OrderingTooHigh { min_eig: f64 },

    #[error("interferometer matrix is not unitary (deviation {deviation:e})")]
    InvalidNetwork { deviation: f64 },

    #[error("transfer matrix is not subunitary (min eigenvalue of I - L^dag L = {min_eig:e})")]
    NotSubunitary { min_eig: f64 },

    #[error("invalid noise strength c = {0} (must be >= 0)")]
    InvalidNoise(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("degenerate detector: efficiency must be positive")]
    DegenerateDetector,

    #[error("ordering s = {s} is below the detector threshold s_bar = {s_bar}; the point value is not a probability")]
    NotAProbability { s: f64, s_bar: f64 },

    #[error("{modes} modes exceeds the exact-oracle limit of {max}")]
    OracleScale { modes: usize, max: usize },

    #[error("Fock truncation did not converge (trace deficit {deficit:e} at cutoff {cutoff})")]
    Truncation { deficit: f64, cutoff: usize },

    #[error("sampling plan infeasible: classicality margin {margin:e} < 0")]
    PlanInfeasible { margin: f64 },

    #[error("numerical consistency violated: {0}")]
    NumericalConsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
