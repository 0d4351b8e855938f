use thiserror::Error;

/// Errors raised by monoid, net and factorisation operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonoidError {
    #[error("element `{element}` does not belong to instance {instance}")]
    ForeignElement { element: String, instance: String },

    #[error("unit has no irreducibility status")]
    UnitInput,

    #[error("invalid instance parameters: {0}")]
    InvalidParams(String),

    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    #[error(
        "factor `{factor}` occurs {count} times within depth {depth}; \
         no element can occur infinitely often in a convergent product"
    )]
    InfiniteMultiplicity {
        factor: String,
        count: u64,
        depth: usize,
    },

    #[error("`{0}` is not an atom of the instance")]
    NotAnAtom(String),

    #[error("exponent map `{0}` has infinite support")]
    InfiniteSupport(String),

    #[error("exponent map `{0}` is not verified to lie in Z(H)")]
    NotInZ(String),

    #[error("`{lower}` is not below `{upper}` componentwise")]
    NotBelow { lower: String, upper: String },

    #[error("index {0} is not part of the stream enumeration")]
    UnknownIndex(u64),

    #[error("{0}")]
    Unsupported(String),
}

impl MonoidError {
    pub(crate) fn parse(column: usize, message: impl Into<String>) -> Self {
        MonoidError::Parse {
            column,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, MonoidError>;
