//! Rademacher sums realized exactly on the dyadic grid, and both sides of
//! the two-sided head-integral estimate for `Σ a_k r_k`.
//!
//! `r_k` is `+1` on the left half and `-1` on the right half of every
//! dyadic interval of length `2^{1-k}`, so `Σ_{k≤n} a_k r_k` is constant on
//! the `2^n` dyadic cells of length `2^{-n}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stepfn::{SeqVec, StepFn};

/// Largest number of terms realized on the dyadic grid.
pub const MAX_TERMS: usize = 20;

#[derive(Clone, Debug)]
pub struct RademacherSum {
    coeffs: SeqVec,
    /// Value on dyadic cell `j`, `0 <= j < 2^n`.
    values: Vec<f64>,
}

impl RademacherSum {
    pub fn new(coeffs: &SeqVec) -> Result<Self> {
        let n = coeffs.len();
        if n == 0 {
            return Err(Error::InvalidArgument("at least one coefficient is required".into()));
        }
        if n > MAX_TERMS {
            return Err(Error::SizeLimit(format!(
                "{n} Rademacher terms exceed the dyadic grid cap of {MAX_TERMS}"
            )));
        }
        let mut values = Vec::with_capacity(1 << n);
        values.push(0.0);
        for &a in coeffs.as_slice() {
            values = values.iter().flat_map(|&v| [v + a, v - a]).collect();
        }
        Ok(RademacherSum {
            coeffs: coeffs.clone(),
            values,
        })
    }

    pub fn coeffs(&self) -> &SeqVec {
        &self.coeffs
    }

    /// Values on the `2^n` dyadic cells (not canonicalized).
    pub fn grid_values(&self) -> &[f64] {
        &self.values
    }

    pub fn to_step(&self) -> StepFn {
        let cells = self.values.len();
        let bps = (0..=cells).map(|j| j as f64 / cells as f64).collect();
        StepFn::new(bps, self.values.clone()).expect("dyadic grid is a valid partition")
    }
}

/// `Σ a_k r_k` as a step function.
pub fn rademacher_sum(coeffs: &SeqVec) -> Result<StepFn> {
    Ok(RademacherSum::new(coeffs)?.to_step())
}

/// The single Rademacher function `r_k`, `1 <= k <= 30`.
pub fn rademacher_fn(k: usize) -> Result<StepFn> {
    if !(1..=30).contains(&k) {
        return Err(Error::InvalidArgument(format!("Rademacher index {k} out of range")));
    }
    let cells = 1usize << k;
    let bps = (0..=cells).map(|j| j as f64 / cells as f64).collect();
    let vals = (0..cells).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
    StepFn::new(bps, vals)
}

/// `2^{-i} ( Σ_{k≤i} a_k + √i (Σ_{k>i} a_k²)^{1/2} )` for `a` sorted
/// nonincreasingly; the first sum is truncated at `n` when `i > n`.
pub fn head_estimate_rhs(sorted: &[f64], i: usize) -> f64 {
    let head_len = i.min(sorted.len());
    let head: f64 = sorted[..head_len].iter().sum();
    let tail: f64 = sorted[head_len..].iter().map(|a| a * a).sum();
    (head + (i as f64).sqrt() * tail.sqrt()) * dyadic(i)
}

/// `2^{-i}`.
pub fn dyadic(i: usize) -> f64 {
    0.5f64.powi(i as i32)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeadEstimate {
    pub i: usize,
    /// `∫_0^{2^{-i}} (Σ a_k r_k)^*`
    pub lhs: f64,
    /// explicit two-term formula
    pub rhs: f64,
    pub ratio: f64,
}

/// Both sides of the head-integral estimate at level `2^{-i}`.
pub fn head_estimate(coeffs: &SeqVec, i: usize) -> Result<HeadEstimate> {
    Ok(head_estimate_profile(coeffs, &[i])?[0])
}

/// [`head_estimate`] at several levels sharing one realization.
pub fn head_estimate_profile(coeffs: &SeqVec, levels: &[usize]) -> Result<Vec<HeadEstimate>> {
    if let Some(&bad) = levels.iter().find(|&&i| i < 1) {
        return Err(Error::InvalidArgument(format!("level i must be >= 1, got {bad}")));
    }
    let sorted = coeffs.rearrange();
    let rearranged = rademacher_sum(&sorted)?.rearrange();
    Ok(levels
        .iter()
        .map(|&i| {
            let lhs = rearranged.head_integral_sorted(dyadic(i));
            let rhs = head_estimate_rhs(sorted.as_slice(), i);
            HeadEstimate {
                i,
                lhs,
                rhs,
                ratio: lhs / rhs,
            }
        })
        .collect())
}
