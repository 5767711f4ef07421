use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid state space: {0}")]
    StateSpace(String),

    #[error("unknown state label `{0}`")]
    UnknownState(String),

    #[error("event has bits outside a space of {n} states")]
    EventOutOfRange { n: usize },

    #[error("{path}: {message}")]
    Validation { path: String, message: String },

    #[error("not a capacity: {0}")]
    NotACapacity(String),

    #[error("not a verification capacity: {0}")]
    NotAVerificationCapacity(String),

    #[error("utility error: {0}")]
    Utility(String),

    #[error("midpoint not representable")]
    MidpointNotRepresentable,

    #[error("binary act requires u(gamma) >= u(beta)")]
    BinaryOrder,

    #[error("no strictly ranked consequence pair is representable")]
    NoRankedPair,

    #[error("menu not strict: `{0}` and `{1}` have equal model value")]
    MenuNotStrict(String, String),

    #[error("menu is empty")]
    EmptyMenu,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("not found at this grid resolution: {0}")]
    NotFound(String),

    #[error("null events differ between the two capacities")]
    NullEventMismatch,

    #[error("internal consistency: {0}")]
    Inconsistent(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<R> = std::result::Result<R, Error>;

impl Error {
    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }
}
