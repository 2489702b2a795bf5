use nalgebra::Complex;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Each variant maps to a stable numeric code (see [`Error::code`]); the CLI
/// uses it as the process exit status and the C ABI returns it verbatim.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("matrix is not Hermitian (asymmetry {asymmetry:e} exceeds {threshold:e})")]
    NotHermitian { asymmetry: f64, threshold: f64 },
    #[error("non-finite entry in {0}")]
    NonFinite(String),
    #[error("operator is not positive semidefinite (min eigenvalue {min_eig:e}, threshold {threshold:e})")]
    NotPsd { min_eig: f64, threshold: f64 },
    #[error("operator is not positive definite (min eigenvalue {min_eig:e})")]
    NotPd { min_eig: f64 },
    #[error("block operator is not nonnegative (min eigenvalue {min_eig:e})")]
    NotNonneg { min_eig: f64 },
    #[error("off-diagonal block does not factor through the diagonal blocks (residual {residual:e})")]
    RangeViolation { residual: f64 },
    #[error("I - lambda*A is numerically singular at lambda = {lambda}")]
    SingularResolvent { lambda: Complex<f64> },
    #[error("transfer function has a pole on the unit circle near angle {angle}")]
    PoleOnCircle { angle: f64 },
    #[error("delta(H) is not positive semidefinite (min eigenvalue {min_eig:e})")]
    DeltaNotPsd { min_eig: f64 },
    #[error("range of beta(H) is not contained in the closure of range delta(H) (residual {residual:e})")]
    C3Violation { residual: f64 },
    #[error("Riccati route and LMI route disagree away from the boundary ({detail})")]
    InconsistentRoutes { detail: String },
    #[error("candidate is not a solution of the Riccati inequality")]
    NotInRi,
    #[error("operation requires a system with one-dimensional state, input and output")]
    NotScalar,
    #[error("no solution converged (best residual {best_residual:e})")]
    NoConvergence { best_residual: f64 },
    #[error("Newton iteration reached a point where delta(H) changes rank")]
    DeltaSingularPath,
    #[error("fixed-point iteration diverged after {iterations} iterations")]
    IterationDiverged { iterations: usize },
    #[error("extremality certificate failed: {0}")]
    CertificateFailed(String),
    #[error("system realization is not minimal")]
    NotMinimal,
    #[error("state dimension {n} exceeds the configured cap {max}")]
    TooLarge { n: usize, max: usize },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable numeric code. Zero is reserved for success.
    pub fn code(&self) -> i32 {
        match self {
            Error::DimensionMismatch(_) => 2,
            Error::InvalidArgument(_) => 3,
            Error::NotHermitian { .. } => 4,
            Error::NonFinite(_) => 5,
            Error::NotPsd { .. } => 6,
            Error::NotPd { .. } => 7,
            Error::NotNonneg { .. } => 8,
            Error::RangeViolation { .. } => 9,
            Error::SingularResolvent { .. } => 10,
            Error::PoleOnCircle { .. } => 11,
            Error::DeltaNotPsd { .. } => 12,
            Error::C3Violation { .. } => 13,
            Error::InconsistentRoutes { .. } => 14,
            Error::NotInRi => 15,
            Error::NotScalar => 16,
            Error::NoConvergence { .. } => 17,
            Error::DeltaSingularPath => 18,
            Error::IterationDiverged { .. } => 19,
            Error::CertificateFailed(_) => 20,
            Error::NotMinimal => 21,
            Error::TooLarge { .. } => 22,
            Error::Parse { .. } => 23,
            Error::Io(_) => 24,
        }
    }

    /// Machine-readable category name, stable across releases.
    pub fn category(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NonFinite(_) => "NonFinite",
            Error::NotPsd { .. } => "NotPSD",
            Error::NotPd { .. } => "NotPD",
            Error::NotNonneg { .. } => "NotNonneg",
            Error::RangeViolation { .. } => "RangeViolation",
            Error::SingularResolvent { .. } => "SingularResolvent",
            Error::PoleOnCircle { .. } => "PoleOnCircle",
            Error::DeltaNotPsd { .. } => "DeltaNotPSD",
            Error::C3Violation { .. } => "C3Violation",
            Error::InconsistentRoutes { .. } => "InconsistentRoutes",
            Error::NotInRi => "NotInRI",
            Error::NotScalar => "NotScalar",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::DeltaSingularPath => "DeltaSingularPath",
            Error::IterationDiverged { .. } => "IterationDiverged",
            Error::CertificateFailed(_) => "CertificateFailed",
            Error::NotMinimal => "NotMinimal",
            Error::TooLarge { .. } => "TooLarge",
            Error::Parse { .. } => "ParseError",
            Error::Io(_) => "IoError",
        }
    }

    /// All codes in use, for exhaustiveness checks downstream.
    pub const CODES: [i32; 23] = [
        2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24,
    ];
}
