//! Class representatives for `x² − d·y² = N`.
//!
//! Every solution class has a member with `0 ≤ y ≤ ⌈√(|N|(t+1)/(2d))⌉`,
//! where `(t, u)` is the fundamental unit. The solver scans that range and
//! groups the hits into classes under multiplication by `±(t + u√d)^k`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{PellError, PellFundamental};
use crate::quadring::integer::{is_perfect_square, isqrt};
use crate::quadring::{QuadInt, RingCtx};

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Largest `|N|` accepted.
    pub max_abs_norm: BigInt,
    /// Largest `y` range the bounded scan may cover.
    pub max_scan_y: BigInt,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_abs_norm: BigInt::from(1_000_000),
            max_scan_y: BigInt::from(10_000_000),
        }
    }
}

/// Canonical class representatives of `x² − d·y² = norm`.
///
/// An empty representative list means the equation has no integer solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormEqClasses {
    pub d: BigInt,
    pub norm: BigInt,
    pub representatives: Vec<QuadInt>,
    pub unit: PellFundamental,
}

pub fn solve_norm_eq(ctx: &RingCtx, norm: &BigInt) -> Result<NormEqClasses, PellError> {
    solve_norm_eq_with(ctx, norm, &SolveOptions::default())
}

pub fn solve_norm_eq_with(
    ctx: &RingCtx,
    norm: &BigInt,
    opts: &SolveOptions,
) -> Result<NormEqClasses, PellError> {
    if norm.is_zero() {
        return Err(PellError::ZeroNorm);
    }
    if norm.abs() > opts.max_abs_norm {
        return Err(PellError::NormCapExceeded {
            norm: norm.clone(),
            cap: opts.max_abs_norm.clone(),
        });
    }
    let d = ctx.d();
    let unit = ctx.fundamental_unit().clone();
    let y_max = search_bound(d, norm, &unit.x);
    if y_max > opts.max_scan_y {
        return Err(PellError::ScanCapExceeded {
            bound: y_max,
            cap: opts.max_scan_y.clone(),
        });
    }

    let mut hits = Vec::new();
    let mut y = BigInt::zero();
    while y <= y_max {
        if let Some(x) = is_perfect_square(&(d * &y * &y + norm)) {
            if !x.is_zero() {
                hits.push(QuadInt::new(-&x, y.clone()));
            }
            hits.push(QuadInt::new(x, y.clone()));
        }
        y += 1;
    }

    // Group into classes; a hit joins a class when its quotient by the
    // class's first member is integral (hence a unit).
    let mut classes: Vec<Vec<QuadInt>> = Vec::new();
    for hit in hits {
        let existing = classes.iter_mut().find(|members| {
            ctx.exact_div(&hit, &members[0])
                .expect("solutions are nonzero")
                .is_some()
        });
        match existing {
            Some(members) => members.push(hit),
            None => classes.push(vec![hit]),
        }
    }
    let mut representatives: Vec<QuadInt> = classes
        .into_iter()
        .map(|members| {
            members
                .into_iter()
                .min_by_key(|s| (s.b.abs(), s.b.is_negative(), !s.a.is_positive()))
                .expect("class is nonempty")
        })
        .collect();
    representatives.sort_by_key(order_key);

    Ok(NormEqClasses {
        d: d.clone(),
        norm: norm.clone(),
        representatives,
        unit,
    })
}

/// `⌈√(|N|(t+1)/(2d))⌉`.
fn search_bound(d: &BigInt, norm: &BigInt, t: &BigInt) -> BigInt {
    let num = norm.abs() * (t + 1);
    let den = d * 2;
    let mut y = isqrt(&(&num / &den));
    while &y * &y * &den < num {
        y += 1;
    }
    y
}

/// Enumeration order: `|y|`, then `|x|`, then positive `x` first, then
/// positive `y` first.
fn order_key(s: &QuadInt) -> (BigInt, BigInt, bool, bool) {
    (s.b.abs(), s.a.abs(), s.a.is_negative(), s.b.is_negative())
}

impl NormEqClasses {
    pub fn is_solvable(&self) -> bool {
        !self.representatives.is_empty()
    }

    /// Every solution with `|y| ≤ y_bound`, in enumeration order.
    pub fn solutions_within(&self, y_bound: &BigInt) -> Vec<QuadInt> {
        let eps = self.unit.as_quad();
        let eps_inv = eps.conjugate();
        let mut found = BTreeSet::new();
        for rep in &self.representatives {
            for start in [rep.clone(), -rep] {
                // Forward: once x and y share a strict sign, |y| grows
                // monotonically under multiplication by eps.
                self.walk(
                    &start,
                    &eps,
                    y_bound,
                    |s| s.a.sign() == s.b.sign(),
                    &mut found,
                );
                // Backward: same with opposite signs and eps⁻¹.
                self.walk(
                    &start,
                    &eps_inv,
                    y_bound,
                    |s| s.a.sign() == -s.b.sign(),
                    &mut found,
                );
            }
        }
        let mut out: Vec<QuadInt> = found.into_iter().collect();
        out.sort_by_key(order_key);
        out
    }

    fn walk(
        &self,
        start: &QuadInt,
        step: &QuadInt,
        y_bound: &BigInt,
        escaping: impl Fn(&QuadInt) -> bool,
        found: &mut BTreeSet<QuadInt>,
    ) {
        let mut cur = start.clone();
        loop {
            let inside = cur.b.abs() <= *y_bound;
            if inside {
                found.insert(cur.clone());
            } else if !cur.a.is_zero() && !cur.b.is_zero() && escaping(&cur) {
                return;
            }
            cur = cur.mul_in(step, &self.d);
        }
    }

    /// The first `limit` solutions in enumeration order.
    pub fn enumerate(&self, limit: usize) -> Vec<QuadInt> {
        if limit == 0 || !self.is_solvable() {
            return Vec::new();
        }
        let mut bound = self
            .representatives
            .iter()
            .map(|r| r.b.abs())
            .max()
            .expect("nonempty")
            .max(BigInt::from(1));
        loop {
            let mut sols = self.solutions_within(&bound);
            if sols.len() >= limit {
                sols.truncate(limit);
                return sols;
            }
            bound *= 2;
        }
    }
}

pub fn enumerate_solutions(classes: &NormEqClasses, limit: usize) -> Vec<QuadInt> {
    classes.enumerate(limit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> QuadInt {
        QuadInt::new(a, b)
    }

    fn n(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn d15_minus6() {
        let r = RingCtx::new(15).unwrap();
        let c = solve_norm_eq(&r, &n(-6)).unwrap();
        assert_eq!(c.representatives, vec![q(3, 1)]);
        assert_eq!(c.enumerate(2), vec![q(3, 1), q(3, -1)]);
        assert_eq!(c.enumerate(4), vec![q(3, 1), q(3, -1), q(-3, 1), q(-3, -1)]);
    }

    #[test]
    fn d735_minus6() {
        let r = RingCtx::allowing_non_square_free(735).unwrap();
        let c = solve_norm_eq(&r, &n(-6)).unwrap();
        assert!(c.representatives.contains(&q(27, 1)));
    }

    #[test]
    fn unsolvable_and_trivial() {
        let r = RingCtx::new(15).unwrap();
        assert!(!solve_norm_eq(&r, &n(-2)).unwrap().is_solvable());
        assert!(!solve_norm_eq(&r, &n(2)).unwrap().is_solvable());
        assert!(solve_norm_eq(&r, &n(-2)).unwrap().enumerate(5).is_empty());
        let one = solve_norm_eq(&r, &n(1)).unwrap();
        assert_eq!(one.representatives, vec![q(1, 0)]);
        assert_eq!(one.enumerate(1), vec![q(1, 0)]);
        assert_eq!(one.enumerate(3), vec![q(1, 0), q(-1, 0), q(4, 1)]);
    }

    #[test]
    fn caps() {
        let r = RingCtx::new(15).unwrap();
        assert!(matches!(solve_norm_eq(&r, &n(0)), Err(PellError::ZeroNorm)));
        assert!(matches!(
            solve_norm_eq(&r, &n(2_000_000)),
            Err(PellError::NormCapExceeded { .. })
        ));
        let tight = SolveOptions {
            max_scan_y: n(1),
            ..SolveOptions::default()
        };
        assert!(matches!(
            solve_norm_eq_with(&r, &n(-600), &tight),
            Err(PellError::ScanCapExceeded { .. })
        ));
    }

    #[test]
    fn multiple_classes_are_kept_apart() {
        // x² − 7y² = 9: (3, 0), (4, 1) and (4, −1) are pairwise
        // non-associate; the last is represented by its negation (−4, 1).
        let r = RingCtx::new(7).unwrap();
        let c = solve_norm_eq(&r, &n(9)).unwrap();
        assert_eq!(c.representatives, vec![q(3, 0), q(4, 1), q(-4, 1)]);
        for (i, x) in c.representatives.iter().enumerate() {
            for y in &c.representatives[i + 1..] {
                assert_eq!(r.exact_div(x, y).unwrap(), None);
            }
        }
    }
}
