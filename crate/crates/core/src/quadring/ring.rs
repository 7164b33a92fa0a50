use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::integer::{is_perfect_square, Factorizer};
use super::{QuadInt, RingError};
use crate::pellsolve::PellFundamental;

/// Construction switches for [`RingCtx`].
#[derive(Debug, Clone, Copy, Default)]
pub struct RingOptions {
    /// Accept radicands divisible by a prime square.
    pub allow_non_square_free: bool,
    pub factorizer: Factorizer,
}

/// The ring Z[√d] for a fixed radicand.
///
/// Immutable once built. The fundamental unit is computed on first use and
/// cached.
#[derive(Debug, Clone)]
pub struct RingCtx {
    d: BigInt,
    d_mod4: u32,
    d_mod60: u32,
    d_mod360: u32,
    square_free: bool,
    unit: OnceLock<PellFundamental>,
}

impl PartialEq for RingCtx {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d
    }
}

impl Eq for RingCtx {}

impl RingCtx {
    /// Builds the ring, rejecting non-square-free `d`.
    pub fn new(d: impl Into<BigInt>) -> Result<Self, RingError> {
        Self::with_options(d, RingOptions::default())
    }

    /// Builds the ring without the square-free requirement. The flag is
    /// still computed and reported by [`RingCtx::square_free`].
    pub fn allowing_non_square_free(d: impl Into<BigInt>) -> Result<Self, RingError> {
        Self::with_options(
            d,
            RingOptions {
                allow_non_square_free: true,
                ..RingOptions::default()
            },
        )
    }

    pub fn with_options(d: impl Into<BigInt>, opts: RingOptions) -> Result<Self, RingError> {
        let d = d.into();
        if d < BigInt::from(2) {
            return Err(RingError::RadicandTooSmall(d));
        }
        if is_perfect_square(&d).is_some() {
            return Err(RingError::PerfectSquare(d));
        }
        let square_free = opts.factorizer.is_square_free(&d)?;
        if !square_free && !opts.allow_non_square_free {
            return Err(RingError::NotSquareFree(d));
        }
        let residue = |m: u32| {
            d.mod_floor(&BigInt::from(m))
                .to_u32()
                .expect("residue fits in u32")
        };
        Ok(RingCtx {
            d_mod4: residue(4),
            d_mod60: residue(60),
            d_mod360: residue(360),
            d,
            square_free,
            unit: OnceLock::new(),
        })
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn d_mod4(&self) -> u32 {
        self.d_mod4
    }

    pub fn d_mod60(&self) -> u32 {
        self.d_mod60
    }

    pub fn d_mod360(&self) -> u32 {
        self.d_mod360
    }

    pub fn square_free(&self) -> bool {
        self.square_free
    }

    /// Minimal positive solution of `x² − d·y² = 1`.
    pub fn fundamental_unit(&self) -> &PellFundamental {
        self.unit
            .get_or_init(|| crate::pellsolve::cf::fundamental_solution(&self.d))
    }

    pub fn mul(&self, x: &QuadInt, y: &QuadInt) -> QuadInt {
        x.mul_in(y, &self.d)
    }

    pub fn square(&self, x: &QuadInt) -> QuadInt {
        x.square_in(&self.d)
    }

    pub fn norm(&self, x: &QuadInt) -> BigInt {
        x.norm_in(&self.d)
    }

    /// `x^e` by repeated squaring.
    pub fn pow(&self, x: &QuadInt, mut e: u64) -> QuadInt {
        let mut result = QuadInt::one();
        let mut base = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.square(&base);
            }
        }
        result
    }

    /// Power of a unit with a signed exponent.
    pub fn unit_pow(&self, unit: &QuadInt, e: i64) -> Result<QuadInt, RingError> {
        if e >= 0 {
            Ok(self.pow(unit, e as u64))
        } else {
            let inv = self.unit_inverse(unit)?;
            Ok(self.pow(&inv, e.unsigned_abs()))
        }
    }

    /// The quotient `x / y` when it lies in Z[√d].
    pub fn exact_div(&self, x: &QuadInt, y: &QuadInt) -> Result<Option<QuadInt>, RingError> {
        if y.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        let n = self.norm(y);
        let num = self.mul(x, &y.conjugate());
        let (qa, ra) = num.a.div_rem(&n);
        if !ra.is_zero() {
            return Ok(None);
        }
        let (qb, rb) = num.b.div_rem(&n);
        if !rb.is_zero() {
            return Ok(None);
        }
        Ok(Some(QuadInt { a: qa, b: qb }))
    }

    pub fn is_unit(&self, x: &QuadInt) -> bool {
        self.norm(x).abs() == BigInt::from(1)
    }

    pub fn unit_inverse(&self, x: &QuadInt) -> Result<QuadInt, RingError> {
        let n = self.norm(x);
        if n == BigInt::from(1) {
            Ok(x.conjugate())
        } else if n == BigInt::from(-1) {
            Ok(-x.conjugate())
        } else {
            Err(RingError::NotAUnit(x.clone()))
        }
    }

    /// Square root in Z[√d]; see [`super::sqrt`].
    pub fn sqrt(&self, z: &QuadInt) -> Option<QuadInt> {
        super::sqrt::sqrt_in_ring(self, z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> QuadInt {
        QuadInt::new(a, b)
    }

    fn r15() -> RingCtx {
        RingCtx::new(15).unwrap()
    }

    #[test]
    fn validation() {
        assert!(matches!(RingCtx::new(16), Err(RingError::PerfectSquare(_))));
        assert!(matches!(
            RingCtx::new(1),
            Err(RingError::RadicandTooSmall(_))
        ));
        assert!(matches!(
            RingCtx::new(-15),
            Err(RingError::RadicandTooSmall(_))
        ));
        assert!(matches!(
            RingCtx::new(735),
            Err(RingError::NotSquareFree(_))
        ));
        let r = RingCtx::allowing_non_square_free(735).unwrap();
        assert!(!r.square_free());
        assert_eq!((r.d_mod4(), r.d_mod60(), r.d_mod360()), (3, 15, 15));
        let r = r15();
        assert!(r.square_free());
        assert_eq!((r.d_mod4(), r.d_mod60(), r.d_mod360()), (3, 15, 15));
    }

    #[test]
    fn multiplication_examples() {
        let r = r15();
        assert_eq!(r.mul(&q(3, -1), &q(3, 1)), q(-6, 0));
        assert_eq!(r.mul(&q(4, 1), &q(4, -1)), q(1, 0));
        assert_eq!(r.mul(&q(-9, 4), &QuadInt::one()), q(-9, 4));
    }

    #[test]
    fn norm_examples() {
        let r = r15();
        assert_eq!(r.norm(&q(4, 1)), BigInt::from(1));
        assert_eq!(r.norm(&q(3, 1)), BigInt::from(-6));
        assert_eq!(r.norm(&QuadInt::zero()), BigInt::from(0));
    }

    #[test]
    fn pow_examples() {
        let r = r15();
        assert_eq!(r.pow(&q(4, 1), 2), q(31, 8));
        assert_eq!(r.pow(&q(4, 1), 0), QuadInt::one());
        assert_eq!(r.pow(&q(7, -3), 1), q(7, -3));
        assert_eq!(r.unit_pow(&q(4, 1), -2).unwrap(), q(31, -8));
    }

    #[test]
    fn division_examples() {
        let r = r15();
        assert_eq!(r.exact_div(&q(2, 0), &q(4, 1)).unwrap(), Some(q(8, -2)));
        assert_eq!(
            r.exact_div(&q(5, 3), &QuadInt::one()).unwrap(),
            Some(q(5, 3))
        );
        assert_eq!(r.exact_div(&q(1, 0), &q(2, 0)).unwrap(), None);
        assert!(matches!(
            r.exact_div(&q(1, 0), &QuadInt::zero()),
            Err(RingError::DivisionByZero)
        ));
    }

    #[test]
    fn unit_examples() {
        let r = r15();
        assert!(r.is_unit(&q(4, 1)));
        assert_eq!(r.unit_inverse(&q(4, 1)).unwrap(), q(4, -1));
        assert!(r.is_unit(&QuadInt::one()));
        assert_eq!(r.unit_inverse(&QuadInt::one()).unwrap(), QuadInt::one());
        assert!(!r.is_unit(&q(3, 1)));
        assert!(matches!(
            r.unit_inverse(&q(3, 1)),
            Err(RingError::NotAUnit(_))
        ));
    }

    #[test]
    fn cached_unit() {
        let r = r15();
        assert_eq!(r.fundamental_unit().as_quad(), q(4, 1));
        let r = RingCtx::allowing_non_square_free(735).unwrap();
        assert_eq!(r.fundamental_unit().as_quad(), q(244, 9));
    }
}
