use thiserror::Error;

/// Errors raised by the hypervector algebra and the layers built on top of it.
#[derive(Debug, Error)]
pub enum VsaError {
    #[error("vector dimension must be at least 1")]
    InvalidDimension,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("cannot bundle an empty list of vectors")]
    EmptyBundle,
    #[error("zero-modulus entry at index {0}: vector is singular")]
    SingularEntry(usize),
    #[error("similarity is undefined for an all-zero vector")]
    UndefinedSimilarity,
    #[error("non-finite encoder input: {0}")]
    NonFiniteInput(f64),
    #[error("circular codec period must be at least 1")]
    InvalidPeriod,
    #[error("relation arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("logic operation arity error: {0}")]
    LogicArity(&'static str),
    #[error("last operator power is zero: numerical relation is not invertible")]
    SingularRule,
    #[error("logical rule output is closer to true than false: inverse unsupported")]
    UnsupportedLogicalInverse,
    #[error("duplicate position index {0} in panel composition")]
    DuplicatePosition(usize),
    #[error("position index {got} out of range for {slots} slots")]
    PositionOutOfRange { got: usize, slots: usize },
    #[error("existence list length {got} does not match grid size {expected}")]
    GridLengthMismatch { expected: usize, got: usize },
    #[error("attribute label {value} out of range for {attribute}")]
    LabelOutOfRange { attribute: &'static str, value: i64 },
    #[error("no rule reached the abduction score floor")]
    NoRuleFound,
}

pub type Result<T> = std::result::Result<T, VsaError>;
