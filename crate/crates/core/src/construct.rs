//! Quadruples `{a, b, a+b+2r, a+4b+4r}` with property D(n).
//!
//! The set has property D(n) whenever `ab + n = r²` and
//! `3n = α₁α₂` with `α₁ = a + 2r + α`, `α₂ = a + 2r − α`. For
//! `n = (4m+2, 4k)` with `m + k` even the factors come from a norm −6
//! element `(γ, δ)`:
//!
//! ```text
//! 3n = (−1)(−6)(2m+1, 2k) = (−γ, δ) · [(γ, δ)(2m+1, 2k)] = α₁ · α₂
//! ```
//!
//! and `a` is any unit of shape (even, odd), which makes
//! `r = ((α₁ + α₂)/2 − a)/2` integral and `b = (r² − n)/a` exact.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pellsolve::{self, norm6_hypotheses, unit_from_norm6, PellError};
use crate::quadring::{QuadInt, RingCtx, RingError};

/// Index pairs in witness order: 12, 13, 14, 23, 24, 34.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

pub const DEFAULT_RETRY_BUDGET: u32 = 64;

pub fn pair_label(pair: (usize, usize)) -> String {
    format!("{}{}", pair.0 + 1, pair.1 + 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
    #[error("m + k = {m} + {k} is odd")]
    OddMPlusK { m: BigInt, k: BigInt },
    #[error("{0} is not integral")]
    NotIntegral(&'static str),
    #[error("no nondegenerate quadruple for unit indices {start}..{end}")]
    RetryBudgetExhausted { start: u32, end: u32 },
    #[error("scaling factor must be nonzero")]
    ZeroScale,
    #[error("malformed quadruple document: {0}")]
    Document(String),
    #[error(transparent)]
    Pell(#[from] PellError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

impl ConstructError {
    fn from_pell(e: PellError) -> Self {
        match e {
            PellError::Hypothesis(msg) => ConstructError::Hypothesis(msg),
            other => ConstructError::Pell(other),
        }
    }
}

/// `n = (4m + 2, 4k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetN {
    pub m: BigInt,
    pub k: BigInt,
    pub n: QuadInt,
}

impl TargetN {
    pub fn new(m: impl Into<BigInt>, k: impl Into<BigInt>) -> Self {
        let (m, k) = (m.into(), k.into());
        let n = QuadInt::new(&m * 4 + 2, &k * 4);
        TargetN { m, k, n }
    }

    /// `(2m + 1, 2k) = n / 2`.
    pub fn half(&self) -> QuadInt {
        QuadInt::new(&self.m * 2 + 1, &self.k * 2)
    }
}

/// Which of the two factorizations `−6 = (γ, −δ)(γ, δ)` to use: `δ ≡ 1`
/// (first) or `δ ≡ −1` (second) mod 6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FactorizationChoice {
    #[default]
    First,
    Second,
}

impl std::str::FromStr for FactorizationChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "first" => Ok(FactorizationChoice::First),
            "second" => Ok(FactorizationChoice::Second),
            other => Err(format!("expected `first` or `second`, got {other:?}")),
        }
    }
}

/// Intermediate values of one construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstructionTrace {
    pub gamma_delta: QuadInt,
    pub factorization_choice: FactorizationChoice,
    pub alpha1: QuadInt,
    pub alpha2: QuadInt,
    /// Unit index that produced a nondegenerate quadruple.
    pub unit_index: u32,
    /// `unit_a = unit_from_norm6(γ, δ) · ε^(2·unit_exponent)`.
    pub unit_exponent: i64,
    pub unit_a: QuadInt,
    pub r: QuadInt,
    pub b: QuadInt,
    pub alpha_sym: QuadInt,
}

/// Four elements, the shift `n`, and optional square-root witnesses in
/// [`PAIRS`] order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quadruple {
    pub elements: [QuadInt; 4],
    pub n: QuadInt,
    pub witnesses: [Option<QuadInt>; 6],
}

impl Quadruple {
    pub fn without_witnesses(&self) -> Quadruple {
        Quadruple {
            witnesses: Default::default(),
            ..self.clone()
        }
    }

    pub fn to_document(&self, ctx: &RingCtx) -> QuadrupleDoc {
        QuadrupleDoc {
            d: ctx.d().to_string(),
            n: self.n.clone(),
            elements: self.elements.to_vec(),
            witnesses: PAIRS
                .iter()
                .zip(&self.witnesses)
                .filter_map(|(p, w)| w.clone().map(|w| (pair_label(*p), w)))
                .collect(),
        }
    }
}

/// JSON form: `{"d", "n", "elements", "witnesses": {"12": .., ..}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadrupleDoc {
    pub d: String,
    pub n: QuadInt,
    pub elements: Vec<QuadInt>,
    #[serde(default)]
    pub witnesses: BTreeMap<String, QuadInt>,
}

impl QuadrupleDoc {
    pub fn d(&self) -> Result<BigInt, ConstructError> {
        self.d
            .parse()
            .map_err(|_| ConstructError::Document(format!("bad d {:?}", self.d)))
    }

    pub fn to_quadruple(&self) -> Result<Quadruple, ConstructError> {
        let elements: [QuadInt; 4] = self.elements.clone().try_into().map_err(|v: Vec<_>| {
            ConstructError::Document(format!("expected 4 elements, found {}", v.len()))
        })?;
        let mut witnesses: [Option<QuadInt>; 6] = Default::default();
        for (label, w) in &self.witnesses {
            let slot = PAIRS
                .iter()
                .position(|p| pair_label(*p) == *label)
                .ok_or_else(|| ConstructError::Document(format!("unknown pair {label:?}")))?;
            witnesses[slot] = Some(w.clone());
        }
        Ok(Quadruple {
            elements,
            n: self.n.clone(),
            witnesses,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConstructOptions {
    pub retry_budget: u32,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions {
            retry_budget: DEFAULT_RETRY_BUDGET,
        }
    }
}

/// Unit schedule `0, 1, −1, 2, −2, ...`.
pub fn unit_exponent(index: u32) -> i64 {
    let i = i64::from(index);
    if i % 2 == 1 {
        (i + 1) / 2
    } else {
        -i / 2
    }
}

pub fn construct_quadruple(
    ctx: &RingCtx,
    m: impl Into<BigInt>,
    k: impl Into<BigInt>,
    unit_index: u32,
    choice: FactorizationChoice,
) -> Result<(Quadruple, ConstructionTrace), ConstructError> {
    construct_quadruple_with(
        ctx,
        &TargetN::new(m, k),
        unit_index,
        choice,
        &ConstructOptions::default(),
    )
}

pub fn construct_quadruple_with(
    ctx: &RingCtx,
    target: &TargetN,
    unit_index: u32,
    choice: FactorizationChoice,
    opts: &ConstructOptions,
) -> Result<(Quadruple, ConstructionTrace), ConstructError> {
    if (&target.m + &target.k).is_odd() {
        return Err(ConstructError::OddMPlusK {
            m: target.m.clone(),
            k: target.k.clone(),
        });
    }
    let classes = norm6_hypotheses(ctx).map_err(ConstructError::from_pell)?;

    // (γ, δ) with δ ≡ ±1 (mod 6); negation swaps the two residues, so the
    // first four enumerated solutions always contain one of each.
    let want = match choice {
        FactorizationChoice::First => 1u8,
        FactorizationChoice::Second => 5u8,
    };
    let six = BigInt::from(6);
    let gamma_delta = classes
        .enumerate(4)
        .into_iter()
        .find(|s| s.b.mod_floor(&six).to_u8() == Some(want))
        .ok_or_else(|| {
            ConstructError::Pell(PellError::ShapeViolation(
                "no norm −6 solution with δ ≡ ±1 (mod 6)".into(),
            ))
        })?;

    let alpha1 = QuadInt::new(-&gamma_delta.a, gamma_delta.b.clone());
    let alpha2 = ctx.mul(&gamma_delta, &target.half());
    let sum = &alpha1 + &alpha2;
    let s = halve(&sum).ok_or(ConstructError::NotIntegral("(α₁ + α₂)/2"))?;
    let alpha_sym =
        halve(&(&alpha1 - &alpha2)).ok_or(ConstructError::NotIntegral("(α₁ − α₂)/2"))?;

    let base_unit = unit_from_norm6(ctx, &gamma_delta)?;
    let eps_sq = ctx.square(&ctx.fundamental_unit().as_quad());

    let end = unit_index.saturating_add(opts.retry_budget);
    for index in unit_index..end {
        let exponent = unit_exponent(index);
        let unit_a = ctx.mul(&base_unit, &ctx.unit_pow(&eps_sq, exponent)?);
        let r = halve(&(&s - &unit_a)).ok_or(ConstructError::NotIntegral("r = (a + 2r − a)/2"))?;
        let r_sq_minus_n = &ctx.square(&r) - &target.n;
        let b = ctx
            .exact_div(&r_sq_minus_n, &unit_a)?
            .ok_or(ConstructError::NotIntegral("b = (r² − n)/a"))?;

        let a = unit_a.clone();
        let two_r = r.scale(&BigInt::from(2));
        let c = &(&a + &b) + &two_r;
        let d4 = &(&a + &b.scale(&BigInt::from(4))) + &r.scale(&BigInt::from(4));
        let elements = [a.clone(), b.clone(), c, d4];
        if !degenerate_check(&elements) {
            continue;
        }

        let two_b = b.scale(&BigInt::from(2));
        let witnesses = [
            Some(r.clone()),
            Some(&a + &r),
            Some(alpha_sym.clone()),
            Some(&b + &r),
            Some(&two_b + &r),
            Some(&(&a + &two_b) + &r.scale(&BigInt::from(3))),
        ];
        let quadruple = Quadruple {
            elements,
            n: target.n.clone(),
            witnesses,
        };
        let trace = ConstructionTrace {
            gamma_delta: gamma_delta.clone(),
            factorization_choice: choice,
            alpha1: alpha1.clone(),
            alpha2: alpha2.clone(),
            unit_index: index,
            unit_exponent: exponent,
            unit_a,
            r,
            b,
            alpha_sym: alpha_sym.clone(),
        };
        return Ok((quadruple, trace));
    }
    Err(ConstructError::RetryBudgetExhausted {
        start: unit_index,
        end,
    })
}

fn halve(x: &QuadInt) -> Option<QuadInt> {
    if x.a.is_odd() || x.b.is_odd() {
        return None;
    }
    Some(QuadInt::new(&x.a >> 1u32, &x.b >> 1u32))
}

/// True iff all four elements are nonzero and pairwise distinct.
pub fn degenerate_check(elements: &[QuadInt; 4]) -> bool {
    elements.iter().all(|e| !e.is_zero()) && PAIRS.iter().all(|&(i, j)| elements[i] != elements[j])
}

/// Result for one pair `{i, j}` (1-based labels).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairCheck {
    pub pair: String,
    /// `a_i·a_j + n`.
    pub value: QuadInt,
    pub witness: Option<QuadInt>,
    /// Whether the stored witness squares to `value`; `None` when absent.
    pub witness_ok: Option<bool>,
    /// Root found by [`RingCtx::sqrt`], independent of the witness.
    pub oracle_root: Option<QuadInt>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub nonzero_distinct: bool,
    pub pairs: Vec<PairCheck>,
    pub all_pass: bool,
}

impl VerificationReport {
    /// Both routes succeeded on every pair and the roots agree up to sign.
    pub fn witnesses_agree_with_oracle(&self) -> bool {
        self.pairs
            .iter()
            .all(|p| match (&p.witness, &p.oracle_root) {
                (Some(w), Some(o)) => {
                    p.witness_ok == Some(true) && w.clone().canonical_sign() == *o
                }
                _ => false,
            })
    }
}

pub fn verify_quadruple(ctx: &RingCtx, q: &Quadruple) -> VerificationReport {
    let pairs: Vec<PairCheck> = PAIRS
        .iter()
        .zip(&q.witnesses)
        .map(|(&(i, j), witness)| {
            let value = &ctx.mul(&q.elements[i], &q.elements[j]) + &q.n;
            let witness_ok = witness.as_ref().map(|w| ctx.square(w) == value);
            let oracle_root = ctx.sqrt(&value);
            let pass = oracle_root.is_some() && witness_ok != Some(false);
            PairCheck {
                pair: pair_label((i, j)),
                value,
                witness: witness.clone(),
                witness_ok,
                oracle_root,
                pass,
            }
        })
        .collect();
    let nonzero_distinct = degenerate_check(&q.elements);
    let all_pass = nonzero_distinct && pairs.iter().all(|p| p.pass);
    VerificationReport {
        nonzero_distinct,
        pairs,
        all_pass,
    }
}

/// `{w·a₁, ..., w·a₄}` with property D(w²·n).
pub fn scale_quadruple(
    ctx: &RingCtx,
    q: &Quadruple,
    w: &QuadInt,
) -> Result<Quadruple, ConstructError> {
    if w.is_zero() {
        return Err(ConstructError::ZeroScale);
    }
    Ok(Quadruple {
        elements: q.elements.clone().map(|e| ctx.mul(w, &e)),
        n: ctx.mul(&ctx.square(w), &q.n),
        witnesses: q.witnesses.clone().map(|o| o.map(|x| ctx.mul(w, &x))),
    })
}

/// The fundamental unit's `t`-th power, used by the scaling family.
pub fn unit_power(ctx: &RingCtx, t: u64) -> QuadInt {
    ctx.pow(&pellsolve::fundamental_unit(ctx).as_quad(), t)
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
    fn base_point_d15() {
        let r = r15();
        let (quad, trace) = construct_quadruple(&r, 0, 0, 0, FactorizationChoice::First).unwrap();
        assert_eq!(quad.elements, [q(4, 1), q(8, -2), q(8, -1), q(28, -7)]);
        assert_eq!(quad.n, q(2, 0));
        let expected_w = [q(-2, 0), q(2, 1), q(-3, 0), q(6, -2), q(14, -4), q(14, -3)];
        for (w, e) in quad.witnesses.iter().zip(expected_w) {
            assert_eq!(w.as_ref(), Some(&e));
        }
        assert_eq!(trace.gamma_delta, q(3, 1));
        assert_eq!(trace.unit_a, q(4, 1));
        assert_eq!(trace.r, q(-2, 0));
        assert_eq!(trace.alpha1, q(-3, 1));
        assert_eq!(trace.alpha2, q(3, 1));
        let report = verify_quadruple(&r, &quad);
        assert!(report.all_pass);
        assert!(report.witnesses_agree_with_oracle());
    }

    #[test]
    fn printed_second_element_fails() {
        // (8 + 2√15) in place of (8 − 2√15): (4 + √15)(8 + 2√15) + 2 is
        // (64, 16), which has no square root in Z[√15].
        let r = r15();
        let quad = Quadruple {
            elements: [q(4, 1), q(8, 2), q(8, -1), q(28, -7)],
            n: q(2, 0),
            witnesses: Default::default(),
        };
        let report = verify_quadruple(&r, &quad);
        assert_eq!(report.pairs[0].value, q(64, 16));
        assert!(!report.pairs[0].pass);
        assert!(!report.all_pass);
    }

    #[test]
    fn trace_identities() {
        let r = r15();
        for (m, k) in [(0, 0), (1, 1), (2, 0), (-3, 5), (7, -1)] {
            for idx in 0..4 {
                let t = TargetN::new(m, k);
                let (quad, tr) = construct_quadruple_with(
                    &r,
                    &t,
                    idx,
                    FactorizationChoice::First,
                    &Default::default(),
                )
                .unwrap();
                assert_eq!(&r.mul(&tr.unit_a, &tr.b) + &t.n, r.square(&tr.r));
                assert_eq!(r.mul(&tr.alpha1, &tr.alpha2), t.n.scale(&BigInt::from(3)));
                let lhs = &tr.alpha1 + &tr.alpha2;
                let rhs = tr.unit_a.scale(&2.into()) + tr.r.scale(&4.into());
                assert_eq!(lhs, rhs);
                assert_eq!(r.norm(&tr.unit_a), BigInt::from(1));
                assert!(tr.unit_a.a.is_even() && tr.unit_a.b.is_odd());
                assert!(verify_quadruple(&r, &quad).witnesses_agree_with_oracle());
            }
        }
    }

    #[test]
    fn second_factorization() {
        let r = r15();
        let (quad, tr) = construct_quadruple(&r, 0, 0, 0, FactorizationChoice::Second).unwrap();
        assert_eq!(tr.gamma_delta, q(3, -1));
        assert!(verify_quadruple(&r, &quad).all_pass);
    }

    #[test]
    fn precondition_errors() {
        let r = r15();
        assert!(matches!(
            construct_quadruple(&r, 1, 0, 0, FactorizationChoice::First),
            Err(ConstructError::OddMPlusK { .. })
        ));
        let r13 = RingCtx::new(13).unwrap();
        assert!(matches!(
            construct_quadruple(&r13, 0, 0, 0, FactorizationChoice::First),
            Err(ConstructError::Hypothesis(_))
        ));
        let r75 = RingCtx::allowing_non_square_free(75).unwrap();
        assert!(matches!(
            construct_quadruple(&r75, 0, 0, 0, FactorizationChoice::First),
            Err(ConstructError::Hypothesis(_))
        ));
        let opts = ConstructOptions { retry_budget: 0 };
        assert!(matches!(
            construct_quadruple_with(
                &r,
                &TargetN::new(0, 0),
                0,
                FactorizationChoice::First,
                &opts
            ),
            Err(ConstructError::RetryBudgetExhausted { .. })
        ));
    }

    #[test]
    fn distinct_unit_indices_give_distinct_quadruples() {
        let r = r15();
        let mut seen = Vec::new();
        for idx in 0..12 {
            let (quad, _) = construct_quadruple(&r, 2, 0, idx, FactorizationChoice::First).unwrap();
            assert!(verify_quadruple(&r, &quad).all_pass);
            assert!(!seen.contains(&quad.elements), "index {idx} repeats");
            seen.push(quad.elements);
        }
    }

    #[test]
    fn unit_schedule() {
        let got: Vec<i64> = (0..7).map(unit_exponent).collect();
        assert_eq!(got, vec![0, 1, -1, 2, -2, 3, -3]);
    }

    #[test]
    fn degeneracy() {
        assert!(degenerate_check(&[q(4, 1), q(8, -2), q(8, -1), q(28, -7)]));
        assert!(!degenerate_check(&[q(0, 0), q(8, -2), q(8, -1), q(28, -7)]));
        assert!(!degenerate_check(&[q(4, 1), q(8, -2), q(4, 1), q(28, -7)]));
    }

    #[test]
    fn tamper_and_strip() {
        let r = r15();
        let (quad, _) = construct_quadruple(&r, 0, 0, 0, FactorizationChoice::First).unwrap();
        let mut bad = quad.clone();
        bad.elements[1] = -&bad.elements[1];
        assert!(!verify_quadruple(&r, &bad).all_pass);
        let bare = quad.without_witnesses();
        let report = verify_quadruple(&r, &bare);
        assert!(report.all_pass);
        assert!(report.pairs.iter().all(|p| p.witness_ok.is_none()));
    }

    #[test]
    fn scaling() {
        let r = r15();
        let (quad, _) = construct_quadruple(&r, 0, 0, 0, FactorizationChoice::First).unwrap();
        assert_eq!(scale_quadruple(&r, &quad, &QuadInt::one()).unwrap(), quad);
        let neg = scale_quadruple(&r, &quad, &q(-1, 0)).unwrap();
        assert_eq!(neg.n, quad.n);
        assert_eq!(neg.elements[0], q(-4, -1));
        assert!(verify_quadruple(&r, &neg).all_pass);
        let up = scale_quadruple(&r, &quad, &unit_power(&r, 1)).unwrap();
        assert_eq!(up.n, q(62, 16));
        assert!(verify_quadruple(&r, &up).witnesses_agree_with_oracle());
        assert!(matches!(
            scale_quadruple(&r, &quad, &QuadInt::zero()),
            Err(ConstructError::ZeroScale)
        ));
    }

    #[test]
    fn document_round_trip() {
        let r = r15();
        let (quad, _) = construct_quadruple(&r, 0, 0, 0, FactorizationChoice::First).unwrap();
        let doc = quad.to_document(&r);
        let json = serde_json::to_string(&doc).unwrap();
        assert!(
            json.starts_with(r#"{"d":"15","n":{"a":"2","b":"0"},"elements":[{"a":"4","b":"1"}"#)
        );
        let back: QuadrupleDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_quadruple().unwrap(), quad);
        assert_eq!(back.d().unwrap(), BigInt::from(15));
    }
}
