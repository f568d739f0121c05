use alloc::string::String;
use core::fmt;

/// Errors raised by the toolkit. Non-signaling violations are not errors;
/// see [`crate::dist::Violation`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    InvalidArgument(String),
    /// Matrix shapes disagree with the outcome profile.
    Shape(String),
    /// Two objects were expected to live on the same scenario.
    ScenarioMismatch,
    /// An operation's precondition does not hold (e.g. `q ⪯ p` for extraction).
    Precondition(String),
    NotCollapsible(String),
    /// A search exceeded its configured cap.
    ResourceLimit {
        what: &'static str,
        cap: usize,
    },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Shape(msg) => write!(f, "shape mismatch: {msg}"),
            Error::ScenarioMismatch => f.write_str("distributions live on different scenarios"),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::NotCollapsible(msg) => write!(f, "not collapsible: {msg}"),
            Error::ResourceLimit { what, cap } => {
                write!(f, "resource limit: {what} exceeds cap of {cap}")
            }
        }
    }
}

impl core::error::Error for Error {}

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::Error::InvalidArgument(alloc::format!($($arg)*))
    };
}
pub(crate) use invalid;
