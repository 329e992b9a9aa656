use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("weight singular at origin is finite only as a limit: (log(e/r))^beta -> infinity; integrate against r^3 instead")]
    SingularAtOrigin,

    #[error("quadrature did not converge on [{a}, {b}]: estimate {estimate:e}, error {error:e}")]
    Quadrature {
        a: f64,
        b: f64,
        estimate: f64,
        error: f64,
    },

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("discretization refused: {0}")]
    Discretization(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
