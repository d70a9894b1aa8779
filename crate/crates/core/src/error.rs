use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("symbol index {index} outside alphabet of size {q}")]
    SymbolOutOfRange { index: usize, q: usize },

    #[error("support must be strictly increasing (offending index {0})")]
    UnsortedSupport(usize),

    #[error("support and values differ in length ({support} vs {values})")]
    SupportValueMismatch { support: usize, values: usize },

    #[error("empty support")]
    EmptySupport,

    #[error("invalid probability {value} at symbol {index}")]
    InvalidProbability { index: usize, value: f64 },

    #[error("non-finite log value at symbol {0}")]
    NonFiniteLog(usize),

    #[error("probability mass {0} exceeds 1")]
    ExcessMass(f64),

    #[error("full-support message sums to {0}, expected 1")]
    FullSupportMass(f64),

    #[error("expected a {expected}-domain message")]
    WrongDomain { expected: &'static str },

    #[error("off-support entries are not uniform (symbol {index}: {value} vs {tail})")]
    NonUniformTail { index: usize, value: f64, tail: f64 },

    #[error("value {value} at symbol {index} is outside the non-zero pattern")]
    MaskViolation { index: usize, value: f64 },

    #[error("weight {q_prime} outside 0..={q}")]
    WeightOutOfRange { q_prime: usize, q: usize },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("malformed mask: {0}")]
    MalformedMask(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Returns `log2(q)` for a power-of-two `q >= 1`.
pub(crate) fn check_pow2(q: usize) -> Result<u32> {
    if q.is_power_of_two() {
        Ok(q.trailing_zeros())
    } else {
        Err(Error::NotPowerOfTwo(q))
    }
}
