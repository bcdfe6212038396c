use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator is not Hermitian (residual {residual:.3e} > {bound:.3e})")]
    NotHermitian { residual: f64, bound: f64 },

    #[error("not a density matrix: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("net too coarse: net delta {net_delta} must be at most {required} for accuracy {delta}")]
    NetTooCoarse {
        net_delta: f64,
        required: f64,
        delta: f64,
    },

    #[error("degenerate cut: normal vanishes after projection (norm {0:.3e})")]
    DegenerateCut(f64),

    #[error("search region has no interior")]
    EmptyRegion,

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("bit-width violation: {0}")]
    BitWidth(String),

    #[error("unknown state family `{0}`")]
    UnknownState(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
