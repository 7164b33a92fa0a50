//! Structure of norm −6 and norm 1 elements when `d ≡ 15 (mod 60)` and
//! `x² − d·y² = −6` is solvable.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::norm_eq::{solve_norm_eq, NormEqClasses};
use super::PellError;
use crate::quadring::{QuadInt, RingCtx};

/// Residue argument that `x² − d·y² = ±2` has no solution: with `5 | d`
/// the equation forces `x² ≡ ±2 (mod 5)`, and neither 2 nor 3 is a square
/// mod 5.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Pm2Certificate {
    pub d_mod_5: u32,
    pub squares_mod_5: Vec<u32>,
    /// `2 mod 5` and `−2 mod 5`.
    pub targets_mod_5: [u32; 2],
    /// The bounded solver found no class for either sign.
    pub solver_agrees: bool,
}

/// Checks the standing hypotheses: `d ≡ 15 (mod 60)` and −6 a norm.
pub fn norm6_hypotheses(ctx: &RingCtx) -> Result<NormEqClasses, PellError> {
    if ctx.d_mod60() != 15 {
        return Err(PellError::Hypothesis(format!(
            "d = {} is not 15 mod 60",
            ctx.d()
        )));
    }
    let classes = solve_norm_eq(ctx, &BigInt::from(-6))?;
    if !classes.is_solvable() {
        return Err(PellError::Hypothesis(format!(
            "x² − {}y² = −6 has no solution",
            ctx.d()
        )));
    }
    Ok(classes)
}

pub fn check_pm2_unsolvable(ctx: &RingCtx) -> Result<Pm2Certificate, PellError> {
    if ctx.d_mod60() != 15 {
        return Err(PellError::Hypothesis(format!(
            "d = {} is not 15 mod 60",
            ctx.d()
        )));
    }
    let d_mod_5 = ctx.d_mod60() % 5;
    let mut squares_mod_5: Vec<u32> = (0..5u32).map(|x| x * x % 5).collect();
    squares_mod_5.sort_unstable();
    squares_mod_5.dedup();
    let targets_mod_5 = [2, 3];
    let residue_ok = d_mod_5 == 0 && targets_mod_5.iter().all(|t| !squares_mod_5.contains(t));

    let mut solver_agrees = true;
    for n in [2, -2] {
        let classes = solve_norm_eq(ctx, &BigInt::from(n))?;
        solver_agrees &= !classes.is_solvable();
    }
    if !residue_ok || !solver_agrees {
        return Err(PellError::Contradiction(format!(
            "±2 certificate failed for d = {}",
            ctx.d()
        )));
    }
    Ok(Pm2Certificate {
        d_mod_5,
        squares_mod_5,
        targets_mod_5,
        solver_agrees,
    })
}

/// `x = 6·alpha + 3` and `y = 6·beta + sign_y`.
///
/// The `±3` on `x` is absorbed into the sign of `alpha`, so `sign_x` is
/// always `+1`; `sign_y` is the unique choice with `6 | y − sign_y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Norm6Shape {
    #[serde(with = "crate::quadring::dec_string")]
    pub alpha: BigInt,
    #[serde(with = "crate::quadring::dec_string")]
    pub beta: BigInt,
    pub sign_x: i8,
    pub sign_y: i8,
}

impl Norm6Shape {
    pub fn x(&self) -> BigInt {
        &self.alpha * 6 + 3 * i32::from(self.sign_x)
    }

    pub fn y(&self) -> BigInt {
        &self.beta * 6 + i32::from(self.sign_y)
    }

    pub fn alpha_plus_beta_even(&self) -> bool {
        (&self.alpha + &self.beta).is_even()
    }
}

pub fn norm6_shape(ctx: &RingCtx, sol: &QuadInt) -> Result<Norm6Shape, PellError> {
    let norm = ctx.norm(sol);
    if norm != BigInt::from(-6) {
        return Err(PellError::WrongNorm {
            element: Box::new(sol.clone()),
            expected: BigInt::from(-6),
            found: norm,
        });
    }
    let six = BigInt::from(6);
    let shape_err = || PellError::ShapeViolation(format!("({sol}) is not (6α ± 3, 6β ± 1)"));
    let (alpha, rx) = (&sol.a - BigInt::from(3)).div_mod_floor(&six);
    if !rx.is_zero() {
        return Err(shape_err());
    }
    let (beta, sign_y) = match sol.b.mod_floor(&six).to_u8() {
        Some(1) => ((&sol.b - 1) / &six, 1),
        Some(5) => ((&sol.b + 1) / &six, -1),
        _ => return Err(shape_err()),
    };
    Ok(Norm6Shape {
        alpha,
        beta,
        sign_x: 1,
        sign_y,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// First enumerated norm −6 solution whose shape has `alpha + beta` of
/// the requested parity.
pub fn select_norm6_by_parity(ctx: &RingCtx, parity: Parity) -> Result<QuadInt, PellError> {
    let classes = norm6_hypotheses(ctx)?;
    let mut limit = 8;
    loop {
        for sol in classes.enumerate(limit) {
            let shape = norm6_shape(ctx, &sol)?;
            if shape.alpha_plus_beta_even() == (parity == Parity::Even) {
                return Ok(sol);
            }
        }
        // Negating x flips the parity of alpha, so the first 4 solutions
        // always contain both parities; this only runs for odd inputs.
        limit *= 2;
    }
}

/// `((γ² + 3)/3, γδ/3)` for a norm −6 element `(γ, δ)`: a norm 1 element
/// with even rational part and odd √d part.
pub fn unit_from_norm6(ctx: &RingCtx, sol: &QuadInt) -> Result<QuadInt, PellError> {
    let norm = ctx.norm(sol);
    if norm != BigInt::from(-6) {
        return Err(PellError::WrongNorm {
            element: Box::new(sol.clone()),
            expected: BigInt::from(-6),
            found: norm,
        });
    }
    let three = BigInt::from(3);
    let (g, d) = (&sol.a, &sol.b);
    let (a, ra) = (g * g + BigInt::from(3)).div_rem(&three);
    let (b, rb) = (g * d).div_rem(&three);
    if !ra.is_zero() || !rb.is_zero() {
        return Err(PellError::ShapeViolation(format!(
            "3 does not divide γ in ({sol})"
        )));
    }
    let unit = QuadInt { a, b };
    if ctx.norm(&unit) != BigInt::from(1) || unit.a.is_odd() || unit.b.is_even() {
        return Err(PellError::ShapeViolation(format!(
            "({unit}) derived from ({sol}) is not an (even, odd) unit"
        )));
    }
    Ok(unit)
}

/// Residue class of the fundamental unit mod 6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FundamentalShape {
    /// `(6α ± 4, 6β ± 1)`
    #[serde(rename = "(6a+-4, 6b+-1)")]
    PlusMinusOne,
    /// `(6α ± 4, 6β + 3)`
    #[serde(rename = "(6a+-4, 6b+3)")]
    PlusThree,
}

pub fn fundamental_shape(ctx: &RingCtx) -> Result<FundamentalShape, PellError> {
    let eps = ctx.fundamental_unit();
    let six = BigInt::from(6);
    let x = eps.x.mod_floor(&six).to_u8();
    let y = eps.y.mod_floor(&six).to_u8();
    match (x, y) {
        (Some(2 | 4), Some(1 | 5)) => Ok(FundamentalShape::PlusMinusOne),
        (Some(2 | 4), Some(3)) => Ok(FundamentalShape::PlusThree),
        _ => Err(PellError::ShapeViolation(format!(
            "fundamental unit ({}) fits neither (6α ± 4, 6β ± 1) nor (6α ± 4, 6β + 3)",
            eps.as_quad()
        ))),
    }
}

/// `Some(d ≡ 15 (mod 360))` when the hypotheses hold, `None` when they do
/// not (not applicable).
pub fn d_congruence_check(ctx: &RingCtx) -> Result<Option<bool>, PellError> {
    match norm6_hypotheses(ctx) {
        Ok(_) => Ok(Some(ctx.d_mod360() == 15)),
        Err(PellError::Hypothesis(_)) => Ok(None),
        Err(e) => Err(e),
    }
}
