use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("characteristic sequence {0:?} is not primitive (gcd != 1)")]
    NonPrimitive(Vec<i64>),
    #[error("not a characteristic sequence: {0}")]
    NotCharSequence(String),
    #[error("not the semigroup of a plane branch: {0}")]
    NotPlaneBranchSemigroup(String),
    #[error("order of a series that vanishes up to its truncation {0}")]
    OrderUnknown(usize),
    #[error("insufficient truncation: need {needed}, have {available}")]
    InsufficientTruncation { needed: usize, available: usize },
    #[error("parametrization is not primitive")]
    NotPrimitive,
    #[error("divisor is not monic in y")]
    NotMonic,
    #[error("coefficient support violates the normal form: {0}")]
    SupportViolation(String),
    #[error("pullback vanishes below the truncation order {0}")]
    ValueAboveTruncation(usize),
    #[error("form is torsion or its image vanishes below truncation {0}")]
    TorsionOrTruncation(usize),
    #[error("window {window} exceeds the admissible bound {bound}")]
    WindowTooLarge { window: i64, bound: i64 },
    #[error("{0} lies in the value semigroup")]
    DeltaInSemigroup(i64),
    #[error("{0} is not a value of a differential")]
    DeltaNotValue(i64),
    #[error("form is not logarithmic along the curve")]
    NotLogarithmic,
    #[error("class is not of type n_g = 2")]
    NotNg2Class,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
