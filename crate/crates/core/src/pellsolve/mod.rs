//! Pell and norm-form equations over Z[√d].

pub mod cf;
mod norm_eq;
mod shapes;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::quadring::{QuadInt, RingCtx, RingError};

pub use cf::{cf_sqrt, CfExpansion};
pub use norm_eq::{
    enumerate_solutions, solve_norm_eq, solve_norm_eq_with, NormEqClasses, SolveOptions,
};
pub use shapes::{
    check_pm2_unsolvable, d_congruence_check, fundamental_shape, norm6_hypotheses, norm6_shape,
    select_norm6_by_parity, unit_from_norm6, FundamentalShape, Norm6Shape, Parity, Pm2Certificate,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PellError {
    #[error("{0} is a perfect square; √d has no periodic expansion")]
    SquareRadicand(BigInt),
    #[error("norm must be nonzero")]
    ZeroNorm,
    #[error("|N| = |{norm}| exceeds the cap {cap}")]
    NormCapExceeded { norm: BigInt, cap: BigInt },
    #[error("search range y ≤ {bound} exceeds the cap {cap}")]
    ScanCapExceeded { bound: BigInt, cap: BigInt },
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
    #[error("({element}) has norm {found}, expected {expected}")]
    WrongNorm {
        element: Box<QuadInt>,
        expected: BigInt,
        found: BigInt,
    },
    #[error("shape violation: {0}")]
    ShapeViolation(String),
    #[error("inconsistent result: {0}")]
    Contradiction(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Minimal positive solution of `x² − d·y² = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PellFundamental {
    #[serde(with = "crate::quadring::dec_string")]
    pub x: BigInt,
    #[serde(with = "crate::quadring::dec_string")]
    pub y: BigInt,
}

impl PellFundamental {
    pub fn as_quad(&self) -> QuadInt {
        QuadInt::new(self.x.clone(), self.y.clone())
    }
}

pub fn fundamental_unit(ctx: &RingCtx) -> PellFundamental {
    ctx.fundamental_unit().clone()
}
