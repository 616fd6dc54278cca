use thiserror::Error;

/// Errors produced by the library.
///
/// Variants fall in two groups: validation failures (malformed input, size
/// mismatch) and resource-guard refusals. Front ends map the second group to a
/// distinct exit status.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("truth table length mismatch: expected {expected} bits, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid character {ch:?} at position {pos} in truth table")]
    InvalidCharacter { ch: char, pos: usize },

    #[error("variable count {0} out of range (1..={max})", max = crate::boolfn::MAX_VARS)]
    VariableCount(usize),

    #[error("operation requires a nonempty Fourier support")]
    EmptySupport,

    #[error("enumeration cap exceeded: {needed} items requested, cap is {cap}")]
    CapExceeded { needed: u128, cap: u128 },

    #[error("memory budget exceeded: {needed} bytes requested, budget is {budget} bytes")]
    MemoryBudget { needed: u128, budget: u128 },

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid box distribution: {0}")]
    InvalidBox(String),

    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    #[error("malformed matrix dump: {0}")]
    MalformedDump(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for refusals caused by memory or runtime guards rather than bad input.
    pub fn is_resource_guard(&self) -> bool {
        matches!(self, Error::CapExceeded { .. } | Error::MemoryBudget { .. } | Error::SizeLimit(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
