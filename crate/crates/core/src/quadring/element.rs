use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// `a + b√d` with exact integer coordinates.
///
/// The radicand is not stored on the element: operations that depend on `d`
/// (multiplication, norm, division, square roots) live on
/// [`RingCtx`](super::RingCtx).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct QuadInt {
    pub a: BigInt,
    pub b: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed element {0:?}: expected `a,b` with base-10 integers")]
pub struct ParseQuadIntError(pub String);

impl QuadInt {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        QuadInt {
            a: a.into(),
            b: b.into(),
        }
    }

    pub fn zero() -> Self {
        QuadInt::default()
    }

    pub fn one() -> Self {
        QuadInt::new(1, 0)
    }

    pub fn from_int(a: impl Into<BigInt>) -> Self {
        QuadInt::new(a, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn conjugate(&self) -> QuadInt {
        QuadInt {
            a: self.a.clone(),
            b: -&self.b,
        }
    }

    /// Integer multiple `k·(a, b)`.
    pub fn scale(&self, k: &BigInt) -> QuadInt {
        QuadInt {
            a: &self.a * k,
            b: &self.b * k,
        }
    }

    /// Product in Z[√d]: `(a, b)(c, e) = (ac + d·be, ae + bc)`.
    pub fn mul_in(&self, other: &QuadInt, d: &BigInt) -> QuadInt {
        QuadInt {
            a: &self.a * &other.a + d * &self.b * &other.b,
            b: &self.a * &other.b + &self.b * &other.a,
        }
    }

    pub fn square_in(&self, d: &BigInt) -> QuadInt {
        QuadInt {
            a: &self.a * &self.a + d * &self.b * &self.b,
            b: BigInt::from(2) * &self.a * &self.b,
        }
    }

    /// `a² − d·b²`.
    pub fn norm_in(&self, d: &BigInt) -> BigInt {
        &self.a * &self.a - d * &self.b * &self.b
    }

    /// The representative of `{self, -self}` with positive rational part,
    /// or positive `√d` part when the rational part is zero.
    pub fn canonical_sign(self) -> QuadInt {
        if self.a.is_negative() || (self.a.is_zero() && self.b.is_negative()) {
            -self
        } else {
            self
        }
    }

    /// Larger of the two coordinate magnitudes.
    pub fn max_abs_coord(&self) -> BigInt {
        self.a.abs().max(self.b.abs())
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.a, self.b)
    }
}

fn parse_coord(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s).ok()
}

impl FromStr for QuadInt {
    type Err = ParseQuadIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseQuadIntError(s.to_string());
        let (a, b) = s.split_once(',').ok_or_else(err)?;
        Ok(QuadInt {
            a: parse_coord(a).ok_or_else(err)?,
            b: parse_coord(b).ok_or_else(err)?,
        })
    }
}

impl Add for QuadInt {
    type Output = QuadInt;
    fn add(self, rhs: QuadInt) -> QuadInt {
        QuadInt {
            a: self.a + rhs.a,
            b: self.b + rhs.b,
        }
    }
}

impl<'a> Add<&'a QuadInt> for &'a QuadInt {
    type Output = QuadInt;
    fn add(self, rhs: &QuadInt) -> QuadInt {
        QuadInt {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        }
    }
}

impl Sub for QuadInt {
    type Output = QuadInt;
    fn sub(self, rhs: QuadInt) -> QuadInt {
        QuadInt {
            a: self.a - rhs.a,
            b: self.b - rhs.b,
        }
    }
}

impl<'a> Sub<&'a QuadInt> for &'a QuadInt {
    type Output = QuadInt;
    fn sub(self, rhs: &QuadInt) -> QuadInt {
        QuadInt {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
        }
    }
}

impl Neg for QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        QuadInt {
            a: -self.a,
            b: -self.b,
        }
    }
}

impl Neg for &QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        QuadInt {
            a: -&self.a,
            b: -&self.b,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct QuadIntRepr {
    a: String,
    b: String,
}

impl Serialize for QuadInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        QuadIntRepr {
            a: self.a.to_string(),
            b: self.b.to_string(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QuadInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = QuadIntRepr::deserialize(deserializer)?;
        let coord = |s: &str| {
            parse_coord(s).ok_or_else(|| serde::de::Error::custom(format!("bad integer {s:?}")))
        };
        Ok(QuadInt {
            a: coord(&repr.a)?,
            b: coord(&repr.b)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn additive_examples() {
        assert_eq!(QuadInt::new(4, 1) + QuadInt::new(3, 1), QuadInt::new(7, 2));
        assert_eq!(QuadInt::new(4, 1) + QuadInt::zero(), QuadInt::new(4, 1));
        assert_eq!(QuadInt::new(3, 1) - QuadInt::new(3, 1), QuadInt::zero());
        assert_eq!(-QuadInt::new(3, -1), QuadInt::new(-3, 1));
    }

    #[test]
    fn conjugation() {
        assert_eq!(QuadInt::new(3, 1).conjugate(), QuadInt::new(3, -1));
        assert_eq!(QuadInt::new(5, 0).conjugate(), QuadInt::new(5, 0));
        let x = QuadInt::new(-7, 12);
        assert_eq!(x.conjugate().conjugate(), x);
    }

    #[test]
    fn text_format() {
        let x: QuadInt = "-28,7".parse().unwrap();
        assert_eq!(x, QuadInt::new(-28, 7));
        assert_eq!(x.to_string(), "-28,7");
        for bad in [
            "x,y", "1", "1,", ",2", "1, 2", " 1,2", "1,2,3", "1.5,2", "--1,2",
        ] {
            assert!(bad.parse::<QuadInt>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn json_format_uses_strings() {
        let x = QuadInt::new(BigInt::from(10).pow(30), -3);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"a":"1000000000000000000000000000000","b":"-3"}"#);
        let back: QuadInt = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<QuadInt>(r#"{"a":1,"b":"2"}"#).is_err());
    }

    #[test]
    fn canonical_sign_choice() {
        assert_eq!(QuadInt::new(-2, 5).canonical_sign(), QuadInt::new(2, -5));
        assert_eq!(QuadInt::new(0, -5).canonical_sign(), QuadInt::new(0, 5));
        assert_eq!(QuadInt::new(3, -1).canonical_sign(), QuadInt::new(3, -1));
    }
}
