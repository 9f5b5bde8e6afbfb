use alloc::string::String;
use core::fmt;

/// Failure modes shared by every operation in the crate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    Domain(String),
    /// Two values of incompatible shape were combined.
    Type(String),
    /// The input is well formed but the catalog cannot represent the request.
    Unsupported(String),
    /// An internal identity failed. Always a bug or a counterexample.
    Invariant(String),
    /// An enumeration bound was exceeded.
    Guard(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Type(m) => write!(f, "type error: {m}"),
            Error::Unsupported(m) => write!(f, "unsupported: {m}"),
            Error::Invariant(m) => write!(f, "invariant failure: {m}"),
            Error::Guard(m) => write!(f, "guard: {m}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
