use thiserror::Error;

/// Errors surfaced by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("assignment does not supply variable q{0}")]
    MissingVariable(u32),

    #[error("relabel mapping is not injective: q{first} and q{second} both map to q{target}")]
    NonInjective {
        first: u32,
        second: u32,
        target: u32,
    },

    #[error("{what} out of range: {value} not in {lo}..={hi}")]
    OutOfRange {
        what: &'static str,
        value: i64,
        lo: i64,
        hi: i64,
    },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("too many variables: {count} exceeds the limit of {limit}")]
    TooManyVariables { count: usize, limit: usize },

    #[error("eigensolver did not converge at s = {s}")]
    NoConvergence { s: f64 },

    #[error("invalid conformation: {0}")]
    InvalidConformation(String),

    #[error(
        "sequence length {len} exceeds the default guard of {guard}; rerun with the long-run flag"
    )]
    GuardExceeded { len: usize, guard: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Short machine-readable category, used by the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::MissingVariable(_) => "missing_variable",
            Error::NonInjective { .. } => "non_injective",
            Error::OutOfRange { .. } => "out_of_range",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::TooManyVariables { .. } => "too_many_variables",
            Error::NoConvergence { .. } => "no_convergence",
            Error::InvalidConformation(_) => "invalid_conformation",
            Error::GuardExceeded { .. } => "guard_exceeded",
        }
    }
}
