//! Step functions on the unit square, mixed norms `X(Y)`, the
//! transposition `T F(s,t) = F(t,s)` and the kernel `K_n` on which `T`
//! fails to map `L^∞(X_p)` into `L^1(X_p)` boundedly.

mod kn;
mod stepfn2d;

pub use kn::{
    column_bound, materialize, tk_lower_bound, KnAnalytic, KnParams, Level, TkBound,
    MATERIALIZE_CAP, MAX_ANALYTIC_LEVEL,
};
pub use stepfn2d::{mixed_norm, mixed_norm_spec, Rect, Section, StepFn2d, STEPFN2D_SCHEMA_VERSION};
