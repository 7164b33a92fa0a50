//! Periodic continued fraction of √d and the fundamental Pell solution.
//!
//! Standard recurrence on the complete quotients `(P + √d)/Q`:
//!
//! ```text
//! P' = a·Q − P,   Q' = (d − P'²)/Q,   a' = ⌊(a₀ + P')/Q'⌋
//! ```
//!
//! starting from `P = 0, Q = 1, a = a₀`.

use num_bigint::BigInt;
use num_traits::One;

use super::{PellError, PellFundamental};
use crate::quadring::integer::{is_perfect_square, isqrt};
use crate::quadring::RingCtx;

/// `√d = [a0; period, period, ...]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfExpansion {
    pub a0: BigInt,
    pub period: Vec<BigInt>,
}

impl CfExpansion {
    pub fn of(d: &BigInt) -> Result<CfExpansion, PellError> {
        if *d < BigInt::one() || is_perfect_square(d).is_some() {
            return Err(PellError::SquareRadicand(d.clone()));
        }
        let a0 = isqrt(d);
        let mut p = BigInt::from(0);
        let mut q = BigInt::one();
        let mut a = a0.clone();
        let mut first: Option<(BigInt, BigInt)> = None;
        let mut period = Vec::new();
        loop {
            p = &a * &q - &p;
            q = (d - &p * &p) / &q;
            a = (&a0 + &p) / &q;
            match &first {
                None => first = Some((p.clone(), q.clone())),
                Some((p1, q1)) if *p1 == p && *q1 == q => break,
                Some(_) => {}
            }
            period.push(a.clone());
        }
        debug_assert_eq!(period.last(), Some(&(&a0 * 2)));
        Ok(CfExpansion { a0, period })
    }

    /// Partial quotients after `a0`, repeating the period forever.
    pub fn quotients(&self) -> impl Iterator<Item = &BigInt> {
        self.period.iter().cycle()
    }
}

pub fn cf_sqrt(ctx: &RingCtx) -> CfExpansion {
    CfExpansion::of(ctx.d()).expect("ring radicand is not a perfect square")
}

/// First convergent `p/q` of √d with `p² − d·q² = 1`.
pub(crate) fn fundamental_solution(d: &BigInt) -> PellFundamental {
    let cf = CfExpansion::of(d).expect("radicand is not a perfect square");
    let (mut p_prev, mut p) = (BigInt::one(), cf.a0.clone());
    let (mut q_prev, mut q) = (BigInt::from(0), BigInt::one());
    let mut quotients = cf.quotients();
    loop {
        if &p * &p - d * &q * &q == BigInt::one() {
            return PellFundamental { x: p, y: q };
        }
        let a = quotients.next().expect("cycle is infinite");
        let p_next = a * &p + &p_prev;
        let q_next = a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
}
