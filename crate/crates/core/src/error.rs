use thiserror::Error;

/// Errors raised by the numerical routines and the theorem checks built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix dimension {0} outside the supported range 2..=8")]
    Dimension(usize),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square: {rows} rows, row {row} has {cols} entries")]
    NotSquare { rows: usize, row: usize, cols: usize },
    #[error("non-finite value encountered")]
    NonFinite,
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not symmetric positive definite")]
    NotSpd,
    #[error("matrix is not a rotation (orthogonality defect {orthogonality:.3e}, det {det})")]
    NotRotation { orthogonality: f64, det: f64 },
    #[error("axis-angle magnitude {0} exceeds pi")]
    AngleOutOfRange(f64),
    #[error("eigenvalue {re} + {im}i lies on the closed negative real axis")]
    BranchCut { re: f64, im: f64 },
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
    #[error("deformation does not preserve orientation (det = {0})")]
    NonOrientation(f64),
    #[error("direction is not a unit vector (|h| = {0})")]
    NotUnit(f64),
    #[error("shear modulus must be positive, got {0}")]
    NonPositiveMu(f64),
    #[error("invalid energy weights mu = {mu}, mu_c = {mu_c}: {reason}")]
    InvalidWeights { mu: f64, mu_c: f64, reason: &'static str },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no counterexample found after {trials} trials (seed {seed})")]
    NotFound { trials: usize, seed: u64 },
    #[error("assertion failed: {0}")]
    AssertionFailure(String),
    #[error("log-energy optimality check failed: {0}")]
    LogOptimality(Box<crate::log_energy::LogOptimalityFailure>),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
