use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SignVector;
use crate::error::{Error, Result};
use crate::stepfn::{Refinement, StepFn};

/// Controls the per-group sign search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Groups up to this size are searched exhaustively.
    pub exhaustive_max: usize,
    /// Random restarts for the greedy search on larger groups.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            exhaustive_max: 20,
            restarts: 64,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KhintchineResult {
    /// Signs aligned with the `group` slice passed in.
    pub delta: SignVector,
    /// `∫ |Σ δ_k a_k f_k|`
    pub value: f64,
    /// `(1/√2) (Σ a_k²)^{1/2}`
    pub bound: f64,
    pub exhaustive: bool,
}

/// `∫|Σ_k s_k col_k|` over the refinement cells.
struct GroupIntegrand {
    measures: Vec<f64>,
    /// `cols[k][j] = a_k f_k` on cell `j`
    cols: Vec<Vec<f64>>,
}

impl GroupIntegrand {
    fn sums(&self, signs: &SignVector) -> Vec<f64> {
        let mut s = vec![0.0; self.measures.len()];
        for (k, col) in self.cols.iter().enumerate() {
            let sg = signs.get(k) as f64;
            for (o, &v) in s.iter_mut().zip(col) {
                *o += sg * v;
            }
        }
        s
    }

    fn integral_of(&self, sums: &[f64]) -> f64 {
        sums.iter().zip(&self.measures).map(|(s, m)| s.abs() * m).sum()
    }

    fn value(&self, signs: &SignVector) -> f64 {
        self.integral_of(&self.sums(signs))
    }

    /// Gray-code sweep over all patterns with the first sign fixed to `+1`
    /// (the integrand is even in the signs).
    fn exhaustive(&self) -> (SignVector, f64) {
        let g = self.cols.len();
        let mut signs = SignVector::all_plus(g);
        let mut sums = self.sums(&signs);
        let mut best = (signs.clone(), self.integral_of(&sums));
        if g == 1 {
            return best;
        }
        for step in 1u64..(1u64 << (g - 1)) {
            let k = step.trailing_zeros() as usize + 1;
            let delta = -2.0 * signs.get(k) as f64;
            for (o, &v) in sums.iter_mut().zip(&self.cols[k]) {
                *o += delta * v;
            }
            signs.flip(k);
            let val = self.integral_of(&sums);
            if val > best.1 {
                best = (signs.clone(), val);
            }
        }
        best
    }

    /// Seeded random restarts, each followed by steepest single-flip ascent.
    fn greedy(&self, restarts: usize, seed: u64) -> (SignVector, f64) {
        let g = self.cols.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = (SignVector::all_plus(g), f64::NEG_INFINITY);
        for _ in 0..restarts.max(1) {
            let mut signs = SignVector::from_mask(g, rng.gen::<u64>());
            let mut sums = self.sums(&signs);
            let mut current = self.integral_of(&sums);
            loop {
                let mut step: Option<(usize, f64)> = None;
                for k in 0..g {
                    let delta = -2.0 * signs.get(k) as f64;
                    let val: f64 = sums
                        .iter()
                        .zip(&self.cols[k])
                        .zip(&self.measures)
                        .map(|((s, v), m)| (s + delta * v).abs() * m)
                        .sum();
                    if val > current * (1.0 + 1e-14) && step.is_none_or(|(_, b)| val > b) {
                        step = Some((k, val));
                    }
                }
                let Some((k, val)) = step else { break };
                let delta = -2.0 * signs.get(k) as f64;
                for (o, &v) in sums.iter_mut().zip(&self.cols[k]) {
                    *o += delta * v;
                }
                signs.flip(k);
                current = val;
            }
            if current > best.1 {
                best = (signs, current);
            }
        }
        best
    }
}

/// Finds `δ` with `∫ |Σ_{k∈group} δ_k a_k f_k| >= (1/√2)(Σ_{k∈group} a_k²)^{1/2}`.
///
/// Such signs exist because the average over all sign patterns already
/// meets the bound (Khintchine's inequality with constant `1/√2`, then
/// Minkowski with `‖f_k‖_1 = 1`). Groups of at most
/// `config.exhaustive_max` members are searched exhaustively and the best
/// pattern is returned; larger groups use seeded greedy restarts. The
/// bound is re-checked on a fresh evaluation either way, and a miss is an
/// error rather than an uncertified answer.
pub fn khintchine_signs(
    a: &[f64],
    f: &[StepFn],
    group: &[usize],
    config: &SearchConfig,
) -> Result<KhintchineResult> {
    if a.len() != f.len() {
        return Err(Error::InvalidArgument(format!(
            "{} coefficients for {} functions",
            a.len(),
            f.len()
        )));
    }
    if group.is_empty() {
        return Err(Error::InvalidArgument("empty group".into()));
    }
    if let Some(&k) = group.iter().find(|&&k| k >= f.len()) {
        return Err(Error::InvalidArgument(format!("group index {k} out of range")));
    }
    for &k in group {
        let norm = f[k].l1_norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "function {k} has L1 norm {norm}, expected 1"
            )));
        }
    }
    let members: Vec<StepFn> = group.iter().map(|&k| f[k].clone()).collect();
    let r = Refinement::new(&members);
    let cols = group
        .iter()
        .zip(r.columns)
        .map(|(&k, col)| col.into_iter().map(|v| a[k] * v).collect())
        .collect();
    let integrand = GroupIntegrand {
        measures: r.breakpoints.windows(2).map(|w| w[1] - w[0]).collect(),
        cols,
    };
    let bound = std::f64::consts::FRAC_1_SQRT_2
        * group.iter().map(|&k| a[k] * a[k]).sum::<f64>().sqrt();

    let exhaustive = group.len() <= config.exhaustive_max;
    let (delta, _) = if exhaustive {
        integrand.exhaustive()
    } else {
        integrand.greedy(config.restarts, config.seed)
    };
    let value = integrand.value(&delta);
    if value < bound * (1.0 - 1e-12) {
        return Err(Error::SearchFailed(format!(
            "best signs reach {value}, below the bound {bound} (group of {}, {})",
            group.len(),
            if exhaustive { "exhaustive" } else { "heuristic" }
        )));
    }
    Ok(KhintchineResult {
        delta,
        value,
        bound,
        exhaustive,
    })
}
