use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("pump line at {wavelength_nm:.4} nm lies outside the grid")]
    OutOfBand { wavelength_nm: f64 },

    #[error("under-resolved: {0}")]
    UnderResolved(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("filter removes the whole JSA (surviving fraction {survival:e})")]
    DegenerateFilter { survival: f64 },

    #[error("JSA is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("JSAs are defined on different grids")]
    GridMismatch,

    #[error("Fock truncation at max_n = {max_n} leaves tail {tail:e}; use max_n >= {suggested}")]
    Truncation { max_n: usize, tail: f64, suggested: usize },

    #[error("scan spans {covered:.6} rad, shorter than one fringe period ({period:.6} rad)")]
    InsufficientCoverage { covered: f64, period: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
