//! Exact arithmetic in Z[√d].

mod element;
pub mod integer;
mod ring;
pub mod sqrt;

use num_bigint::BigInt;
use thiserror::Error;

pub use element::{ParseQuadIntError, QuadInt};
pub use integer::{
    divisors, factorize, is_perfect_square, is_square_free, Factorization, Factorizer, IntegerError,
};
pub use ring::{RingCtx, RingOptions};
pub use sqrt::{sqrt_by_divisor_pairs, sqrt_in_ring};

/// Serde adapter writing a `BigInt` as a decimal string.
pub mod dec_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse()
            .map_err(|_| serde::de::Error::custom(format!("bad integer {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("radicand {0} must be at least 2")]
    RadicandTooSmall(BigInt),
    #[error("radicand {0} is a perfect square")]
    PerfectSquare(BigInt),
    #[error("radicand {0} is not square-free")]
    NotSquareFree(BigInt),
    #[error("division by the zero element")]
    DivisionByZero,
    #[error("({0}) is not a unit")]
    NotAUnit(QuadInt),
    #[error(transparent)]
    Integer(#[from] IntegerError),
}
