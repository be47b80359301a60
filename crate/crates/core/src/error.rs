use thiserror::Error;

use crate::multiindex::MultiIndex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shell count overflows u64 for d={dim}, n={order}")]
    CountOverflow { dim: usize, order: u64 },

    #[error("truncation too large: {count} coefficients for d={dim}, N={order_cap}")]
    TooLarge {
        dim: usize,
        order_cap: u32,
        count: u64,
    },

    #[error("multi-index {alpha} is outside the truncation |α| ≤ {order_cap}")]
    IndexOutOfRange { alpha: MultiIndex, order_cap: u32 },

    #[error("multi-index {alpha} has {got} entries, expected {dim}")]
    IndexDimension {
        alpha: MultiIndex,
        got: usize,
        dim: usize,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid shell range [{lo}, {hi}) for order cap {order_cap}")]
    InvalidRange { lo: u32, hi: u32, order_cap: u32 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite coefficient at {alpha}")]
    NonFinite { alpha: MultiIndex },

    #[error("weight sequence has {len} entries, need {needed}")]
    WeightTooShort { len: usize, needed: usize },

    #[error("weight δ_{index} = {value} is not a positive finite number")]
    InvalidWeight { index: usize, value: f64 },

    #[error("empty ε sequence")]
    EmptyEps,

    #[error("ε_{index} = {value} is not positive")]
    NonPositiveEps { index: usize, value: f64 },

    #[error("order cap must be at least 1 to build δ")]
    ZeroOrderCap,

    #[error("δ system covers orders up to {covered}, element needs {needed}")]
    CoverageMismatch { covered: u32, needed: u32 },

    #[error("growth window {window} must lie in 1..={order_cap}")]
    InvalidWindow { window: u32, order_cap: u32 },

    #[error("pole a_{axis} = {pole} is not outside K (max grid coordinate {max})")]
    PoleInsideK { axis: usize, pole: f64, max: f64 },

    #[error("invalid family parameters: {0}")]
    FamilyParams(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("incomplete germ file: {0}")]
    Incomplete(String),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error describes a structurally invalid element or file
    /// (as opposed to unparsable input).
    pub fn is_shape_violation(&self) -> bool {
        matches!(
            self,
            Error::IndexOutOfRange { .. }
                | Error::IndexDimension { .. }
                | Error::ShapeMismatch(_)
                | Error::InvalidRange { .. }
                | Error::InvalidGrid(_)
                | Error::NonFinite { .. }
                | Error::WeightTooShort { .. }
                | Error::CoverageMismatch { .. }
                | Error::PoleInsideK { .. }
                | Error::Incomplete(_)
                | Error::TooLarge { .. }
                | Error::CountOverflow { .. }
        )
    }
}
