//! Computational laboratory for rearrangement-invariant function spaces on
//! `[0, 1)`: exact step-function calculus, Lorentz / Marcinkiewicz / Orlicz
//! norms, Rademacher sums, a constructive sign-selection algorithm with
//! certificates, mixed norms with the transposition counterexample, and a
//! seeded experiment harness.

// NaN-rejecting guards are written as `!(a < x)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod mixed2d;
pub mod norms;
pub mod numeric;
pub mod rademacher;
pub mod signselect;
pub mod stepfn;

pub use error::{Error, Result};
pub use norms::{SpaceSpec, WeakVariant, WeightFn};
pub use stepfn::{SeqVec, StepFn};
