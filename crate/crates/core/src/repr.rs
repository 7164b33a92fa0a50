//! Which `n` can be ruled out, and a brute-force check of `n = p² − q²`.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pellsolve::{check_pm2_unsolvable, norm6_hypotheses};
use crate::quadring::{QuadInt, RingCtx};

pub const DEFAULT_SEARCH_BOUND: u64 = 500;
/// Largest bound the i128 scan accepts.
pub const MAX_SEARCH_BOUND: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReprError {
    #[error("d = {0} is not 3 mod 4")]
    DNotThreeModFour(BigInt),
    #[error("search bound must be positive")]
    ZeroBound,
    #[error("search bound {0} exceeds {MAX_SEARCH_BOUND}")]
    BoundTooLarge(u64),
    #[error("inputs exceed the 64-bit range of the search oracle")]
    OutOfOracleRange,
}

/// The four shapes of S, and T for everything else.
///
/// | tag                  | shape              |
/// |----------------------|--------------------|
/// | `odd`                | `(2m+1, 2k)`       |
/// | `four_four`          | `(4m, 4k)`         |
/// | `four_four_plus_two` | `(4m, 4k+2)`       |
/// | `two_mod_four`       | `(4m+2, 4k)`       |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NClass {
    #[serde(rename = "odd")]
    Odd,
    #[serde(rename = "four_four")]
    FourFour,
    #[serde(rename = "four_four_plus_two")]
    FourFourPlusTwo,
    #[serde(rename = "two_mod_four")]
    TwoModFour,
    T,
}

impl NClass {
    pub fn tag(self) -> &'static str {
        match self {
            NClass::Odd => "odd",
            NClass::FourFour => "four_four",
            NClass::FourFourPlusTwo => "four_four_plus_two",
            NClass::TwoModFour => "two_mod_four",
            NClass::T => "T",
        }
    }

    pub fn in_s(self) -> bool {
        self != NClass::T
    }
}

impl std::fmt::Display for NClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

pub fn classify_n(n: &QuadInt) -> NClass {
    let four = BigInt::from(4);
    let a = n.a.mod_floor(&four).to_u8().expect("residue");
    let b = n.b.mod_floor(&four).to_u8().expect("residue");
    match (a, b) {
        (1 | 3, 0 | 2) => NClass::Odd,
        (0, 0) => NClass::FourFour,
        (0, 2) => NClass::FourFourPlusTwo,
        (2, 0) => NClass::TwoModFour,
        _ => NClass::T,
    }
}

/// For `d ≡ 3 (mod 4)`, `n ∈ T` admits no D(n) quadruple. Returns whether
/// that nonexistence result applies.
pub fn no_quadruple_if_t(ctx: &RingCtx, n: &QuadInt) -> Result<bool, ReprError> {
    if ctx.d_mod4() != 3 {
        return Err(ReprError::DNotThreeModFour(ctx.d().clone()));
    }
    Ok(classify_n(n) == NClass::T)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingChecks {
    pub d_mod_60: u32,
    pub minus6_solvable: bool,
    pub pm2_unsolvable: bool,
}

impl RingChecks {
    pub fn all_hold(&self) -> bool {
        self.d_mod_60 == 15 && self.minus6_solvable && self.pm2_unsolvable
    }
}

/// Hypotheses under which `n = 2u`, `u = (2m+1, 2k)` of norm 1, is not a
/// difference of two squares.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonRepCertificate {
    pub n: QuadInt,
    pub u: QuadInt,
    #[serde(with = "crate::quadring::dec_string")]
    pub norm_u: BigInt,
    pub ring_checks: RingChecks,
}

impl NonRepCertificate {
    pub fn unit_check(&self) -> bool {
        self.norm_u.is_one()
    }

    /// Re-derives the certificate from `ctx` and `n` and compares.
    pub fn recheck(&self, ctx: &RingCtx) -> bool {
        certify_nonrepresentable(ctx, &self.n).as_ref() == Some(self)
    }
}

/// Returns a certificate only when every hypothesis holds; otherwise no
/// claim is made.
pub fn certify_nonrepresentable(ctx: &RingCtx, n: &QuadInt) -> Option<NonRepCertificate> {
    if classify_n(n) != NClass::TwoModFour {
        return None;
    }
    let u = QuadInt::new(&n.a / 2, &n.b / 2);
    let norm_u = ctx.norm(&u);
    if !norm_u.is_one() || ctx.d_mod60() != 15 {
        return None;
    }
    norm6_hypotheses(ctx).ok()?;
    check_pm2_unsolvable(ctx).ok()?;
    Some(NonRepCertificate {
        n: n.clone(),
        u,
        norm_u,
        ring_checks: RingChecks {
            d_mod_60: ctx.d_mod60(),
            minus6_solvable: true,
            pm2_unsolvable: true,
        },
    })
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub bound: u64,
    /// Skip pairs with `y₁ + y₂` even when `n.a ≡ 2 (mod 4)`.
    pub parity_pruning: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            bound: DEFAULT_SEARCH_BOUND,
            parity_pruning: false,
        }
    }
}

pub fn search_repr(
    ctx: &RingCtx,
    n: &QuadInt,
    bound: u64,
) -> Result<Option<(QuadInt, QuadInt)>, ReprError> {
    search_repr_with(
        ctx,
        n,
        &SearchOptions {
            bound,
            ..SearchOptions::default()
        },
    )
}

/// First `(p, q)` with `p² − q² = n` and every coordinate in `[−bound, bound]`,
/// scanning `p = (x₁, y₁)` with `x₁, y₁ ≥ 0` in lexicographic order.
///
/// Since `q` and `−q` give the same square, `y₂ ≥ 0`; for `y₂ > 0` the
/// √d coordinate of the equation fixes `x₂ = (x₁y₁ − n.b/2)/y₂`.
pub fn search_repr_with(
    ctx: &RingCtx,
    n: &QuadInt,
    opts: &SearchOptions,
) -> Result<Option<(QuadInt, QuadInt)>, ReprError> {
    if opts.bound == 0 {
        return Err(ReprError::ZeroBound);
    }
    if opts.bound > MAX_SEARCH_BOUND {
        return Err(ReprError::BoundTooLarge(opts.bound));
    }
    let fit = |v: &BigInt| v.to_i64().ok_or(ReprError::OutOfOracleRange);
    let d = i128::from(fit(ctx.d())?);
    let na = i128::from(fit(&n.a)?);
    let nb = i128::from(fit(&n.b)?);
    if nb.is_odd() {
        // 2·x₁y₁ − 2·x₂y₂ is even.
        return Ok(None);
    }
    let half_nb = nb / 2;
    let bound = i128::from(opts.bound);
    let prune = opts.parity_pruning && na.mod_floor(&4) == 2;

    let hit = (0..=opts.bound).into_par_iter().find_map_first(|x1| {
        let x1 = i128::from(x1);
        (0..=bound).find_map(|y1| {
            let big_a = x1 * x1 + d * y1 * y1 - na;
            if big_a < 0 {
                return None;
            }
            let big_b = x1 * y1 - half_nb;
            scan_q(d, big_a, big_b, bound, y1, prune).map(|(x2, y2)| ((x1, y1), (x2, y2)))
        })
    });
    Ok(hit.map(|((x1, y1), (x2, y2))| (QuadInt::new(x1, y1), QuadInt::new(x2, y2))))
}

/// Solves `x₂² + d·y₂² = big_a`, `x₂·y₂ = big_b` with `0 ≤ y₂`, `|x₂| ≤ bound`.
fn scan_q(
    d: i128,
    big_a: i128,
    big_b: i128,
    bound: i128,
    y1: i128,
    prune: bool,
) -> Option<(i128, i128)> {
    let y_max = (big_a / d).sqrt().min(bound);
    let parity_ok = |y2: i128| !prune || (y1 + y2).is_odd();
    if big_b == 0 {
        if parity_ok(0) {
            let x2 = big_a.sqrt();
            if x2 * x2 == big_a && x2 <= bound {
                return Some((x2, 0));
            }
        }
        // x₂ = 0 and d·y₂² = big_a.
        let y2 = y_max;
        if y2 > 0 && d * y2 * y2 == big_a && parity_ok(y2) {
            return Some((0, y2));
        }
        return None;
    }
    // |x₂| ≤ bound forces y₂ ≥ |big_b| / bound.
    let y_min = ((big_b.abs() + bound - 1) / bound).max(1);
    (y_min..=y_max).find_map(|y2| {
        if !parity_ok(y2) || big_b % y2 != 0 {
            return None;
        }
        let x2 = big_b / y2;
        (x2 * x2 + d * y2 * y2 == big_a).then_some((x2, y2))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(a: i64, b: i64) -> QuadInt {
        QuadInt::new(a, b)
    }

    fn r15() -> RingCtx {
        RingCtx::new(15).unwrap()
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_n(&q(3, 0)), NClass::Odd);
        assert_eq!(classify_n(&q(2, 0)), NClass::TwoModFour);
        assert_eq!(classify_n(&q(2, 2)), NClass::T);
        assert_eq!(classify_n(&q(-4, 8)), NClass::FourFour);
        assert_eq!(classify_n(&q(8, -2)), NClass::FourFourPlusTwo);
        assert_eq!(classify_n(&q(1, 1)), NClass::T);
        assert_eq!(classify_n(&q(-7, 6)), NClass::Odd);
    }

    #[test]
    fn t_lemma() {
        let r = r15();
        assert!(no_quadruple_if_t(&r, &q(2, 2)).unwrap());
        assert!(!no_quadruple_if_t(&r, &q(2, 0)).unwrap());
        let r13 = RingCtx::new(13).unwrap();
        assert!(matches!(
            no_quadruple_if_t(&r13, &q(2, 2)),
            Err(ReprError::DNotThreeModFour(_))
        ));
    }

    #[test]
    fn certificates() {
        let r = r15();
        let c = certify_nonrepresentable(&r, &q(2, 0)).unwrap();
        assert_eq!(c.u, q(1, 0));
        assert!(c.unit_check() && c.ring_checks.all_hold());
        let c = certify_nonrepresentable(&r, &q(62, 16)).unwrap();
        assert_eq!(c.u, q(31, 8));
        assert!(c.recheck(&r));
        assert!(certify_nonrepresentable(&r, &q(10, 0)).is_none());
        assert!(certify_nonrepresentable(&r, &q(3, 0)).is_none());
        // Shape and unit fine, ring hypotheses fail.
        let r7 = RingCtx::new(7).unwrap();
        assert!(certify_nonrepresentable(&r7, &q(16, 12)).is_none());
    }

    #[test]
    fn certificate_json() {
        let c = certify_nonrepresentable(&r15(), &q(2, 0)).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(
            json,
            r#"{"n":{"a":"2","b":"0"},"u":{"a":"1","b":"0"},"norm_u":"1","ring_checks":{"d_mod_60":15,"minus6_solvable":true,"pm2_unsolvable":true}}"#
        );
        let back: NonRepCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn closure_under_unit_squares() {
        let r = r15();
        let eps2 = r.square(&r.fundamental_unit().as_quad());
        let mut n = q(2, 0);
        for _ in 0..6 {
            assert!(certify_nonrepresentable(&r, &n).is_some());
            n = r.mul(&n, &eps2);
        }
    }

    #[test]
    fn search_examples() {
        let r = r15();
        assert_eq!(
            search_repr(&r, &q(3, 0), 5).unwrap(),
            Some((q(2, 0), q(1, 0)))
        );
        assert_eq!(search_repr(&r, &q(2, 0), 200).unwrap(), None);
        // First hit in scan order, confirmed by an independent 4-loop scan.
        let (p, qq) = search_repr(&r, &q(19, 4), 20).unwrap().unwrap();
        assert_eq!(&r.square(&p) - &r.square(&qq), q(19, 4));
        assert_eq!((p, qq), (q(2, 1), q(0, 0)));
        assert!(matches!(
            search_repr(&r, &q(3, 0), 0),
            Err(ReprError::ZeroBound)
        ));
        let huge = QuadInt::new(BigInt::from(10).pow(30), 0);
        assert!(matches!(
            search_repr(&r, &huge, 5),
            Err(ReprError::OutOfOracleRange)
        ));
    }

    #[test]
    fn parity_pruning_agrees_on_shifts_of_two() {
        let r = r15();
        let with = SearchOptions {
            bound: 60,
            parity_pruning: true,
        };
        for n in [q(2, 0), q(6, 4), q(-2, 8), q(10, 0)] {
            let plain = search_repr(&r, &n, 60).unwrap();
            let pruned = search_repr_with(&r, &n, &with).unwrap();
            assert_eq!(plain.is_some(), pruned.is_some(), "n = {n}");
        }
    }

    proptest! {
        #[test]
        fn classes_partition(a in -10_000i64..10_000, b in -10_000i64..10_000) {
            let n = q(a, b);
            let c = classify_n(&n);
            let shapes = [
                a.rem_euclid(2) == 1 && b.rem_euclid(2) == 0,
                a.rem_euclid(4) == 0 && b.rem_euclid(4) == 0,
                a.rem_euclid(4) == 0 && b.rem_euclid(4) == 2,
                a.rem_euclid(4) == 2 && b.rem_euclid(4) == 0,
            ];
            prop_assert!(shapes.iter().filter(|s| **s).count() <= 1);
            let expected = match shapes.iter().position(|s| *s) {
                Some(0) => NClass::Odd,
                Some(1) => NClass::FourFour,
                Some(2) => NClass::FourFourPlusTwo,
                Some(3) => NClass::TwoModFour,
                _ => NClass::T,
            };
            prop_assert_eq!(c, expected);
        }

        #[test]
        fn search_hits_are_sound(a in -40i64..40, b in -6i64..6) {
            let r = r15();
            let n = q(a, b);
            if let Some((p, qq)) = search_repr(&r, &n, 12).unwrap() {
                prop_assert_eq!(&r.square(&p) - &r.square(&qq), n);
                prop_assert!(p.a >= BigInt::from(0) && p.b >= BigInt::from(0));
            }
        }
    }
}
