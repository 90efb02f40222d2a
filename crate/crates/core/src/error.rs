use thiserror::Error;

use crate::diagram::SpiderId;
use crate::phase::ParamId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("dense evaluation too large: {0}")]
    SizeCap(String),
    #[error("diagram still contains unassigned parameters")]
    Parameterized,
    #[error("expected {expected} boundary bits, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("no spider with id {0}")]
    MissingSpider(SpiderId),
    #[error("parameter {0} is already in use")]
    ParamCollision(ParamId),
    #[error("unknown parameter {0}")]
    UnknownParam(ParamId),
    #[error("diagram has open boundary wires")]
    NotScalar,
    #[error("{stage}: projected {projected:.3e} exceeds cap {cap:.3e}")]
    ResourceCap {
        stage: String,
        projected: f64,
        cap: f64,
    },
    #[error("singular linear solve: {0}")]
    Singular(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
