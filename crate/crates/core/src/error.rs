use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Gaussian space: {0}")]
    InvalidSpace(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("point has dimension {got}, space has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("ball B({center:?}, {radius}) is not contained in [-{half_width}, {half_width}]^d")]
    BallOutsideDomain {
        center: Vec<f64>,
        radius: f64,
        half_width: f64,
    },

    #[error(
        "ball B({center:?}, {radius}) is not admissible at scale {scale}: radius cap is {cap}"
    )]
    NotAdmissible {
        center: Vec<f64>,
        radius: f64,
        scale: f64,
        cap: f64,
    },

    #[error("point {point:?} lies outside B({center:?}, {radius})")]
    PointOutsideBall {
        point: Vec<f64>,
        center: Vec<f64>,
        radius: f64,
    },

    #[error("weight `{label}` is not strictly positive at node {node}")]
    NonPositiveWeight { label: String, node: usize },

    #[error("grid values must be finite and nonnegative (node {node} has {value})")]
    InvalidGridValue { node: usize, value: f64 },

    #[error("no admissible epsilon on the dyadic grid below beta = {beta}")]
    NoEpsilonFound { beta: f64 },

    #[error("exponent mismatch: {0}")]
    ExponentMismatch(String),

    #[error("testing condition failed: sampled constant {constant} exceeds cap {cap}")]
    TestingConditionFailed { constant: f64, cap: f64 },

    #[error("operation is not available in dimension {0}")]
    UnsupportedDimension(usize),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed grid file: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_param(
    ok: bool,
    name: &'static str,
    reason: impl FnOnce() -> String,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: reason(),
        })
    }
}
