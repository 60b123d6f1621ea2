use thiserror::Error;

/// Errors raised by the library. The CLI maps these onto exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not a supported prime (primes up to 31)")]
    InvalidModulus(u32),

    #[error("modulus mismatch: expected p={expected}, found p={found}")]
    ModulusMismatch { expected: u8, found: u8 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("residue {value} out of range for p={p}")]
    ResidueOutOfRange { value: u32, p: u8 },

    #[error("invalid input: {0}")]
    Input(String),

    /// A documented precondition of a construction does not hold for the given data.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("resource guard: {what} (limit {limit})")]
    ResourceGuard { what: String, limit: u64 },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn guard(what: impl Into<String>, limit: u64) -> Self {
        Error::ResourceGuard {
            what: what.into(),
            limit,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
