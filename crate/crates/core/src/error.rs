use num_bigint::BigUint;
use thiserror::Error;

use crate::aggregate::SemigroupId;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("point {point} outside [0, {degree})")]
    PointOutOfRange { point: usize, degree: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("degree {degree} exceeds the cap {cap} for this strategy")]
    DegreeCapExceeded { degree: usize, cap: usize },

    #[error("requested {requested} coset representatives but the index is {index}")]
    CosetCountExceedsIndex { requested: u64, index: BigUint },

    #[error("semigroup {0:?} is not idempotent; compressed evaluation needs d . d = d")]
    NonIdempotentSemigroup(SemigroupId),

    #[error("problem `{0}` does not guarantee regular certificate orbits")]
    NonRegularOrbits(String),

    #[error("transversal size {index} exceeds the budget {budget}")]
    TransversalBudgetExceeded { index: BigUint, budget: u64 },

    #[error("certificate space of size {count} exceeds the enumeration budget {budget}")]
    CertificateBudgetExceeded { count: BigUint, budget: u64 },

    #[error("instance space of size {count} exceeds the table budget {budget}")]
    TableBudgetExceeded { count: BigUint, budget: u64 },

    #[error("semigroup power with exponent 0 is undefined (no identity element)")]
    ZeroPower,

    #[error("no strict majority among {0} retrieved values")]
    MajorityUndefined(usize),

    #[error("unknown problem id `{0}`")]
    UnknownProblem(String),

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("index {index} out of range for a space of {count} entries")]
    IndexOutOfRange { index: u64, count: u64 },

    #[error("semigroup value type does not match the semigroup")]
    ValueTypeMismatch,

    #[error("flip strategy requires a Boolean value domain, got max value {0}")]
    FlipNeedsBoolean(u64),

    #[error("delta must satisfy 0 <= delta < 1, got {0}")]
    BadDelta(String),

    #[error("epsilon must lie strictly between 0 and 1/2, got {0}")]
    BadEpsilon(String),

    #[error("problem binding mismatch: table is `{table}` (n={table_n}), expected `{expected}` (n={expected_n})")]
    BindingMismatch {
        table: String,
        table_n: u32,
        expected: String,
        expected_n: u32,
    },

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
