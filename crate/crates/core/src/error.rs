use thiserror::Error;

/// Errors raised by the numerical pipeline and its file formats.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates an operation's precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two inputs live on incompatible grids.
    #[error("axis mismatch: {0}")]
    AxisMismatch(String),

    /// A numerical contract was breached (imaginary residue, mass loss, ...).
    #[error("numerical contract violated: {0}")]
    Contract(String),

    /// A file could not be decoded.
    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! invalid {
    ($($arg:tt)*) => { $crate::error::Error::InvalidArgument(format!($($arg)*)) };
}

macro_rules! mismatch {
    ($($arg:tt)*) => { $crate::error::Error::AxisMismatch(format!($($arg)*)) };
}

macro_rules! contract {
    ($($arg:tt)*) => { $crate::error::Error::Contract(format!($($arg)*)) };
}

pub(crate) use {contract, invalid, mismatch};
