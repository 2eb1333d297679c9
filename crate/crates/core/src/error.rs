use thiserror::Error;

pub type Result<T, E = GordianError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum GordianError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate curve: {0}")]
    Degenerate(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("curve is not thick: reach {reach:.6} below required {required:.6}")]
    NotThick { reach: f64, required: f64 },

    #[error("apex lies on the base curve")]
    ApexOnCurve,

    #[error("point is not on the cone: {0}")]
    NotOnCone(String),

    #[error("curves touch (distance {0:.3e}); linking number undefined")]
    CurvesTouch(f64),

    #[error("no generic projection direction found after {0} perturbations")]
    NoGenericDirection(usize),

    #[error("mark {index} invalid: {reason}")]
    BadMark { index: usize, reason: String },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("missing component designation: {0}")]
    MissingComponent(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
