use thiserror::Error;

/// Errors raised by the algebra, the Steenrod action and the certificate layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),

    #[error("generator count must be between 1 and {max}, got {k}")]
    GeneratorCount { k: usize, max: usize },

    #[error("elements live in different contexts")]
    ContextMismatch,

    #[error("exponent {exponent} exceeds the exponent cap {cap}")]
    ExponentCap { exponent: u64, cap: u32 },

    #[error("operation index {n} exceeds the recursion cap {cap}")]
    RecursionCap { n: u32, cap: u32 },

    #[error("the zero element has no degree")]
    ZeroDegree,

    #[error("{op} requires a homogeneous input")]
    MixedDegree { op: &'static str },

    #[error("{op} is not defined at p = {p}")]
    WrongPrime { op: &'static str, p: u32 },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("generator index {index} is outside 1..={k}")]
    GeneratorIndex { index: usize, k: usize },

    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),

    #[error("class length m = {m} is outside 1..={k}")]
    ClassLength { m: usize, k: usize },

    #[error("level n = {0} is out of range")]
    Level(i64),

    #[error(
        "Q-engines disagree on {input}: derivation gives {derivation}, recursion gives {recursive}"
    )]
    EngineDisagreement {
        input: String,
        derivation: String,
        recursive: String,
    },

    #[error("internal assertion failed: {0}")]
    Assertion(String),

    #[error("malformed certificate: {0}")]
    Certificate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
