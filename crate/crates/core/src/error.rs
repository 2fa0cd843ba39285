use thiserror::Error;

/// Errors raised by the library.
///
/// `SizeLimitExceeded` and `CapExceeded` mark computations refused because an
/// exact method would not finish at the requested size; every other variant is
/// a validation failure of the input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no generators supplied")]
    EmptyGenerators,
    #[error("trivial upper set: {0}")]
    TrivialUpperSet(String),
    #[error("mask width {found} does not match ground size {expected}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("ground size {size} outside the supported range 1..={max}")]
    GroundSizeOutOfRange { size: usize, max: usize },
    #[error("element {element} out of range for ground size {ground_size}")]
    ElementOutOfRange { element: usize, ground_size: usize },
    #[error("input is not an antichain: {0}")]
    NotAntichain(String),
    #[error("{what} = {value} exceeds the limit {limit}")]
    SizeLimitExceeded {
        what: &'static str,
        value: u128,
        limit: u128,
    },
    #[error("{0}")]
    CapExceeded(String),
    #[error("Monte Carlo estimation needs a sample count and a seed")]
    MissingMcParams,
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("bisection did not converge: residual {residual:e} with tolerance {tolerance:e}")]
    NonConvergence { residual: f64, tolerance: f64 },
    #[error("k = {k} outside 1..={m}")]
    KOutOfRange { k: usize, m: usize },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("method {0} needs an exact evaluation")]
    InexactMethod(&'static str),
    #[error("empty input")]
    EmptyInput,
    #[error("need at least {needed} records, got {found}")]
    TooFewRecords { needed: usize, found: usize },
    #[error("invalid instance: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors that refuse work because of a size or search cap.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            Error::SizeLimitExceeded { .. } | Error::CapExceeded(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
