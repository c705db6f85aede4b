use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mixed2d::StepFn2d;
use crate::stepfn::{SeqVec, StepFn};

/// Default cell budget of generated step functions.
pub const DEFAULT_MAX_CELLS: usize = 32;

/// Generator for trial `trial` of a run seeded with `seed`: the same
/// ChaCha key, one stream per trial, so trials can run in any order.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Sorted distinct interior points, uniform in `(0, 1)`.
fn random_breakpoints<R: Rng>(rng: &mut R, cells: usize) -> Vec<f64> {
    let mut inner: Vec<f64> = (1..cells).map(|_| rng.gen::<f64>()).collect();
    inner.retain(|&x| x > 0.0);
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    let mut bps = Vec::with_capacity(inner.len() + 2);
    bps.push(0.0);
    bps.extend(inner);
    bps.push(1.0);
    bps
}

fn random_value<R: Rng>(rng: &mut R, nonneg: bool) -> f64 {
    if nonneg {
        rng.gen_range(0.0..=1.0)
    } else {
        rng.gen_range(-1.0..=1.0)
    }
}

/// Cell count uniform in `1..=max_cells`, breakpoints uniform, values
/// uniform in `[-1, 1]` (or `[0, 1]` with `nonneg`).
pub fn random_stepfn<R: Rng>(rng: &mut R, max_cells: usize, nonneg: bool) -> StepFn {
    let cells = rng.gen_range(1..=max_cells.max(1));
    let bps = random_breakpoints(rng, cells);
    let values = (1..bps.len()).map(|_| random_value(rng, nonneg)).collect();
    StepFn::new(bps, values).expect("generated breakpoints are valid")
}

/// A family of `n` functions from [`random_stepfn`], none identically zero.
pub fn random_family<R: Rng>(rng: &mut R, n: usize, max_cells: usize, nonneg: bool) -> Vec<StepFn> {
    (0..n)
        .map(|_| loop {
            let f = random_stepfn(rng, max_cells, nonneg);
            if !f.is_zero() {
                break f;
            }
        })
        .collect()
}

/// Positive sequence with entries uniform in `(0, 1]`.
pub fn random_positive_seq<R: Rng>(rng: &mut R, n: usize) -> SeqVec {
    SeqVec::new((0..n).map(|_| 1.0 - rng.gen::<f64>()).collect()).expect("finite entries")
}

/// Tensor-grid function with up to `max_cells` cells along each axis.
pub fn random_stepfn2d<R: Rng>(rng: &mut R, max_cells: usize, nonneg: bool) -> StepFn2d {
    let cs = rng.gen_range(1..=max_cells.max(1));
    let ct = rng.gen_range(1..=max_cells.max(1));
    let sb = random_breakpoints(rng, cs);
    let tb = random_breakpoints(rng, ct);
    let values: Vec<Vec<f64>> = (1..sb.len())
        .map(|_| (1..tb.len()).map(|_| random_value(rng, nonneg)).collect())
        .collect();
    StepFn2d::from_grid(&sb, &tb, &values).expect("generated grid is valid")
}
