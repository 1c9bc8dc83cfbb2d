use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GoebelError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An exact intermediate grew past the configured bit cap. `last_complete`
    /// is the largest index whose value was fully computed (0 if none).
    #[error("digit budget of {max_bits} bits exceeded after index {last_complete}")]
    BudgetExceeded { max_bits: u64, last_complete: u64 },

    /// The requested index needs more p-adic precision than the run was given.
    #[error("budget underflow: n = {n} needs nu_{p}(n!) = {needed} > r = {r}")]
    BudgetUnderflow { p: u64, r: u32, n: u64, needed: u32 },

    #[error("p-adic valuation of zero is undefined")]
    ValuationOfZero,

    #[error("g_{{{k},{l}}}({n}) is not {p}-integral")]
    NonIntegral { k: u32, l: u32, n: u64, p: u64 },

    /// Two independent precision runs disagreed beyond the requested tolerance.
    #[error("precision self-check failed for {what}: runs differ by more than 1e-{digits}")]
    PrecisionMismatch { what: String, digits: u32 },

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for GoebelError {
    fn from(e: std::io::Error) -> Self {
        GoebelError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, GoebelError>;
