//! Square roots in Z[√d].
//!
//! If `w = x + y√d` squares to `z = a + b√d` then `a = x² + d·y²`,
//! `b = 2xy` and `norm(z) = (x² − d·y²)²`. [`sqrt_in_ring`] inverts these
//! relations directly: with `s = √norm(z)` it needs `x² = (a ± s)/2` and
//! `d·y² = (a ∓ s)/2`. The cost is two integer square roots, independent of
//! how hard the coordinates are to factor.
//!
//! [`sqrt_by_divisor_pairs`] enumerates factor pairs of `b/2` instead. It is
//! slower and only practical while `b/2` factors quickly, so it serves as a
//! cross-check.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::integer::{is_perfect_square, Factorizer, IntegerError};
use super::{QuadInt, RingCtx};

/// Returns `w` with `w² = z`, canonicalised to a positive rational part
/// (or positive `√d` part when the rational part is zero).
pub fn sqrt_in_ring(ctx: &RingCtx, z: &QuadInt) -> Option<QuadInt> {
    let d = ctx.d();
    if z.a.is_negative() || z.b.is_odd() {
        return None;
    }
    let s = is_perfect_square(&ctx.norm(z))?;
    for s_signed in [s.clone(), -s] {
        let twice_x2 = &z.a + &s_signed;
        if twice_x2.is_odd() {
            continue;
        }
        let x2: BigInt = &twice_x2 >> 1u32;
        let dy2 = &z.a - &x2;
        let (y2, rem) = dy2.div_rem(d);
        if !rem.is_zero() {
            continue;
        }
        let (Some(x), Some(y)) = (is_perfect_square(&x2), is_perfect_square(&y2)) else {
            continue;
        };
        let half_b: BigInt = &z.b >> 1u32;
        let xy = &x * &y;
        let root = if xy == half_b {
            QuadInt { a: x, b: y }
        } else if -&xy == half_b {
            QuadInt { a: x, b: -y }
        } else {
            continue;
        };
        debug_assert_eq!(ctx.square(&root), *z);
        return Some(root.canonical_sign());
    }
    None
}

/// Square root by enumerating `x·y = b/2` over the divisors of `|b/2|`.
///
/// When `b = 0` the candidates are `(√a, 0)` and `(0, √(a/d))`.
pub fn sqrt_by_divisor_pairs(
    ctx: &RingCtx,
    z: &QuadInt,
    factorizer: &Factorizer,
) -> Result<Option<QuadInt>, IntegerError> {
    let d = ctx.d();
    if z.b.is_zero() {
        if let Some(s) = is_perfect_square(&z.a) {
            return Ok(Some(QuadInt::new(s, 0)));
        }
        let (q, r) = z.a.div_rem(d);
        if r.is_zero() {
            if let Some(s) = is_perfect_square(&q) {
                return Ok(Some(QuadInt::new(0, s)));
            }
        }
        return Ok(None);
    }
    if z.b.is_odd() || z.a.is_negative() {
        return Ok(None);
    }
    let half_b: BigInt = &z.b >> 1u32;
    for x in factorizer.divisors(&half_b.abs())? {
        let y = &half_b / &x;
        if &x * &x + d * &y * &y == z.a {
            return Ok(Some(QuadInt::new(x, y).canonical_sign()));
        }
    }
    Ok(None)
}
