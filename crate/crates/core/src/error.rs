use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("zero has no discrete logarithm")]
    ZeroElement,

    #[error("precision loss: {0}")]
    PrecisionLoss(String),

    #[error("enumeration of {needed} elements exceeds the budget of {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },

    #[error("character is not admissible (it is fixed by the Galois generator)")]
    NotAdmissible,

    #[error("character of the residue field is not regular")]
    NotRegular,

    #[error("the value at the uniformizer has order {order}, which does not divide {modulus}")]
    IncompatibleVarpiOrder { order: u64, modulus: u64 },

    #[error("unsupported presentation: {0}")]
    UnsupportedPresentation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("twisted norm is not surjective onto {0}")]
    NormNotSurjective(String),

    #[error("internal consistency check failed: {0}")]
    CrossCheck(String),

    #[error("the two sides disagree: {0}")]
    Disagreement(String),

    #[error("pair {pair} failed: {source}")]
    PairFailed { pair: String, source: Box<Error> },

    #[error("parse error: {0}")]
    Parse(String),
}
