use crate::ring::EisensteinInt;

/// Errors raised by the exact arithmetic and the synthesis routines.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{value} is not divisible by {divisor}")]
    NotDivisible {
        value: EisensteinInt,
        divisor: EisensteinInt,
    },
    #[error("128-bit overflow in ring arithmetic")]
    Overflow,
    #[error("vector is not a unit Eisenstein vector")]
    NotUnit,
    #[error("matrix is not unitary")]
    NotUnitary,
    #[error("no syllable lowers the denominator exponent {sde}")]
    NoReduction { sde: u32 },
    #[error("invariant breach: {0}")]
    InvariantBreach(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
