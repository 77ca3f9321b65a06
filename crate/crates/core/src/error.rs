use thiserror::Error;

/// Errors produced anywhere in the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("axis {axis} out of range for a {dim}-dimensional grid")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("the zero vector has no symbol value")]
    ZeroPoint,

    #[error("point lies on a bad hyperplane (distance {0:e})")]
    OnBadSet(f64),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("expected a {expected} profile")]
    ProfileKind { expected: &'static str },

    #[error("scale range: {0}")]
    ScaleRange(String),

    #[error("exponents violate the Hölder condition: sum of reciprocals is {0}")]
    Holder(f64),

    #[error("grid file: {0}")]
    Format(String),

    #[error("config: {0}")]
    Config(String),

    #[error("linear program: {0}")]
    Lp(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
