use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid ring parameters: {0}")]
    InvalidParams(String),
    #[error("modulus is not irreducible mod {0}")]
    ReducibleModulus(u64),
    #[error("p^M = {p}^{m} exceeds the 62-bit working range")]
    PrecisionTooLarge { p: u64, m: u32 },
    #[error("operands live in different rings")]
    ParamMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("element is not a unit")]
    NotUnit,
    #[error("series diverges: need e >= 1 for odd p and e >= 2 for p = 2 (got p = {p}, e = {e})")]
    Divergent { p: u64, e: u32 },
    #[error("element is not congruent to 1 mod p^{0}")]
    NotCongruent(u32),
    #[error("precision exhausted: need {needed} p-adic digits, have {available}")]
    PrecisionExhausted { needed: u32, available: u32 },
    #[error("malformed form key: {0}")]
    MalformedKey(String),
    #[error("Frobenius is trivial on an extension of degree 1")]
    TrivialFrobenius,
    #[error("coset representatives are invalid: {0}")]
    InvalidReps(String),
    #[error("chain is not a cycle")]
    NotACycle,
    #[error("index {0} exceeds the enumeration limit")]
    IndexTooLarge(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
