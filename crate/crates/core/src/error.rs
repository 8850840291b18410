use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown generator symbol `{symbol}` in word `{word}`")]
    UnknownGenerator { symbol: String, word: String },
    #[error("radius must be nonnegative, got {0}")]
    NegativeRadius(f64),
    #[error("no Følner sequence is shipped for {0}")]
    NoFolnerSequence(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("weight below 1 at support point {0}")]
    WeightBelowOne(String),
    #[error("Gram matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("condition `{condition}` violated by {violation:.3e} at {witness}")]
    ConditionViolated {
        condition: String,
        violation: f64,
        witness: String,
    },
    #[error("section does not map the identity to the identity")]
    SectionNotNormalized,
    #[error("ideal is the whole algebra")]
    IdealIsWhole,
    #[error("coefficient algebra is not commutative")]
    NotCommutative,
    #[error("coefficient at {0} is not fixed by the action")]
    NotFixedByAction(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
