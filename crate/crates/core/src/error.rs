use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The error-control loop could not reach the requested accuracy.
    #[error("precision plan infeasible: achieved error ~2^{achieved_log2:.1}, target 2^-{target}")]
    PrecisionInfeasible { achieved_log2: f64, target: i32 },

    /// A quantity that must be real came out with a visible imaginary part.
    #[error("imaginary leak {leak} exceeds bound {bound} (working bits {working_bits})")]
    ImaginaryLeak {
        leak: String,
        bound: String,
        working_bits: u32,
    },

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
