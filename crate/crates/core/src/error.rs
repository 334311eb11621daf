use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("determinant {det:e} is within tolerance {tol:e} of zero")]
    DegenerateSign { det: f64, tol: f64 },

    #[error("matrix is numerically singular")]
    SingularInput,

    #[error("linear operator is not invertible: {0}")]
    SingularOperator(String),

    #[error("sign map is undefined in dimension one")]
    DimensionOne,

    #[error("sampled {side} signs disagree: the input is not a division algebra")]
    SignInconsistent { side: &'static str },

    #[error("map is numerically zero")]
    ZeroMap,

    #[error("exact 2-d division check requested for dimension {0}")]
    ModeMismatch(usize),

    #[error("subspaces do not form a valid decoration: {0}")]
    BadSplit(String),

    #[error("centre has dimension {0}, more than 2")]
    CenterTooLarge(usize),

    #[error("element is not idempotent (residual {0:e})")]
    NotIdempotent(f64),

    #[error("no hyperplane of square roots of the idempotent line was found")]
    NoHyperplane,

    #[error("algebra is not e-quadratic")]
    NotEQuadratic,

    #[error("found {0} qualifying idempotents, expected exactly one")]
    NonUniqueIdempotent(usize),

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("normal forms lie in different blocks ({src} vs {dst})")]
    BlockMismatch { src: String, dst: String },

    #[error("no imaginary unit found in the unital algebra")]
    NoImaginaryUnit,

    #[error("algebra is not a division algebra")]
    NotDivision,

    #[error("reduction failed to converge: {0}")]
    NonConvergence(String),

    #[error("quaternion is zero")]
    ZeroQuaternion,

    #[error("matrix is not special orthogonal (det {det:.6}, orthogonality defect {defect:e})")]
    NotSpecialOrthogonal { det: f64, defect: f64 },

    #[error("isoclinic factorization residual {0:e} exceeds tolerance")]
    FactorizationFailed(f64),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl Error {
    /// True for failures caused by floating point collapse rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateSign { .. }
                | Error::NonConvergence(_)
                | Error::FactorizationFailed(_)
                | Error::SingularInput
        )
    }
}
