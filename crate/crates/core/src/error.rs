use thiserror::Error;

/// Errors raised by the analysis operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("the zero form is not allowed here")]
    ZeroForm,
    #[error("form has odd degree {degree}")]
    OddDegree { degree: usize },
    #[error("fiber dimension n = {n} is below 3")]
    DimensionTooSmall { n: usize },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("root isolation did not separate within {cap} bits")]
    PrecisionExhausted { cap: u32 },
    #[error("point does not lie on the quadric")]
    PointNotOnQuadric,
    #[error("quadratic form is degenerate")]
    DegenerateForm,
    #[error("local model is already smooth (k = 0)")]
    AlreadySmooth,
    #[error("point is not the vertex of a singular fiber")]
    NotAVertexPoint,
    #[error("need at least 4 points, got {count}")]
    TooFewPoints { count: usize },
    #[error("forms must be squarefree")]
    NotSquarefree,
    #[error("fiber dimensions differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("pullback is not in the ideal; remainder {remainder}")]
    PullbackFailure { remainder: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("expression is not homogeneous: degree {expected} and {found}")]
    NonHomogeneous { expected: u32, found: u32 },
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl From<crate::roots::RootError> for Error {
    fn from(e: crate::roots::RootError) -> Self {
        match e {
            crate::roots::RootError::PrecisionExhausted { cap } => {
                Error::PrecisionExhausted { cap }
            }
        }
    }
}

impl Error {
    /// Stable variant name for machine-readable error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroForm => "ZeroForm",
            Error::OddDegree { .. } => "OddDegree",
            Error::DimensionTooSmall { .. } => "DimensionTooSmall",
            Error::SingularMatrix => "SingularMatrix",
            Error::PrecisionExhausted { .. } => "PrecisionExhausted",
            Error::PointNotOnQuadric => "PointNotOnQuadric",
            Error::DegenerateForm => "DegenerateForm",
            Error::AlreadySmooth => "AlreadySmooth",
            Error::NotAVertexPoint => "NotAVertexPoint",
            Error::TooFewPoints { .. } => "TooFewPoints",
            Error::NotSquarefree => "NotSquarefree",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::PullbackFailure { .. } => "PullbackFailure",
            Error::Parse { .. } => "ParseError",
            Error::NonHomogeneous { .. } => "NonHomogeneous",
            Error::Internal(_) => "Internal",
        }
    }

    /// The error is a consequence of bad input rather than a failed computation.
    pub fn is_invalid_input(&self) -> bool {
        !matches!(
            self,
            Error::PrecisionExhausted { .. } | Error::PullbackFailure { .. } | Error::Internal(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
