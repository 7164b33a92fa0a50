//! Diophantine quadruples with property D(n) in Z[√d].
//!
//! For square-free `d ≡ 15 (mod 60)` where `x² − d·y² = −6` is solvable,
//! this crate builds quadruples `{a, b, a+b+2r, a+4b+4r}` whose pairwise
//! products plus `n = 4m + 2 + 4k√d` (with `m + k` even) are all squares,
//! and pairs the ones with `n = 2·ε^{2t}` (ε the fundamental unit) with a
//! certificate that `n` is not a difference of two squares in Z[√d].
//!
//! Modules, bottom up:
//!
//! - [`quadring`]: exact arithmetic, integer utilities and square roots.
//! - [`pellsolve`]: continued fractions, norm equations, residue shapes.
//! - [`construct`]: the quadruple construction, verification and scaling.
//! - [`repr`]: the S/T classification and non-representability checks.
//! - [`counterex`]: the `d = 360(10α² + α) + 15` family and reports.

pub mod construct;
pub mod counterex;
pub mod pellsolve;
pub mod quadring;
pub mod repr;

pub use quadring::{QuadInt, RingCtx, RingError};
