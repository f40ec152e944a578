use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported parameter: {0}")]
    Unsupported(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} supports at most {max} sites, got {sites}")]
    SizeLimit {
        what: &'static str,
        max: usize,
        sites: usize,
    },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("state has no weight in the physical subspace (retention {0:e})")]
    ZeroSupport(f64),

    #[error("cut {cut} is out of range for a chain of {sites} sites")]
    CutOutOfRange { cut: usize, sites: usize },

    #[error("value {0} is outside the domain of the rate function")]
    Domain(f64),

    #[error("malformed circuit: {0}")]
    Structure(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
}

pub type Result<T> = core::result::Result<T, Error>;
