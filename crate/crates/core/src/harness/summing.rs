use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::random::trial_rng;
use crate::error::{Error, Result};
use crate::norms::SpaceSpec;
use crate::signselect::SignVector;
use crate::stepfn::{Refinement, SeqVec, StepFn};

/// Families up to this size are searched exhaustively.
pub const MAX_EXHAUSTIVE_SIGNS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxSignConfig {
    pub exhaustive_max: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for MaxSignConfig {
    fn default() -> Self {
        MaxSignConfig {
            exhaustive_max: MAX_EXHAUSTIVE_SIGNS,
            restarts: 32,
            seed: 0,
        }
    }
}

/// `max_ε ‖Σ ε_k f_k‖`, or the best value found when `exact` is false.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignMax {
    pub value: f64,
    pub signs: SignVector,
    pub exact: bool,
}

struct SignedSums<'a> {
    r: Refinement,
    space: &'a SpaceSpec,
}

impl SignedSums<'_> {
    fn norm(&self, signs: &SignVector) -> Result<f64> {
        self.space.norm(&self.r.combine(&signs.to_f64()))
    }

    /// True when no cell carries two nonzero functions.
    fn disjoint(&self) -> bool {
        (0..self.r.num_cells())
            .all(|j| self.r.columns.iter().filter(|c| c[j] != 0.0).count() <= 1)
    }
}

pub fn max_sign_norm(f: &[StepFn], space: &SpaceSpec) -> Result<SignMax> {
    max_sign_norm_with(f, space, &MaxSignConfig::default())
}

/// Every norm here is even, so the first sign is fixed to `+1`. Disjointly
/// supported families are settled at once since all signs give the same
/// modulus; otherwise families of at most `exhaustive_max` are enumerated
/// in parallel and larger ones get seeded restarts with single flips.
pub fn max_sign_norm_with(f: &[StepFn], space: &SpaceSpec, config: &MaxSignConfig) -> Result<SignMax> {
    if f.is_empty() {
        return Err(Error::InvalidArgument("empty family".into()));
    }
    if !space.is_function_space() {
        return Err(Error::InvalidSpace(format!("`{space}` is not a function space")));
    }
    let n = f.len();
    let sums = SignedSums {
        r: Refinement::new(f),
        space,
    };
    if sums.disjoint() {
        let signs = SignVector::all_plus(n);
        return Ok(SignMax {
            value: sums.norm(&signs)?,
            signs,
            exact: true,
        });
    }
    if n <= config.exhaustive_max.min(MAX_EXHAUSTIVE_SIGNS) {
        let half = 1u64 << (n - 1);
        let (mask, value) = (0..half)
            .into_par_iter()
            .map(|m| sums.norm(&SignVector::from_mask(n, m << 1)).map(|v| (m, v)))
            .try_reduce(
                || (u64::MAX, f64::NEG_INFINITY),
                |x, y| {
                    let better = y.1 > x.1 || (y.1 == x.1 && y.0 < x.0);
                    Ok(if better { y } else { x })
                },
            )?;
        return Ok(SignMax {
            value,
            signs: SignVector::from_mask(n, mask << 1),
            exact: true,
        });
    }
    let runs: Vec<(SignVector, f64)> = (0..config.restarts.max(1) as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = trial_rng(config.seed, r);
            let mut signs = SignVector::from_mask(n, rng.gen::<u64>() & !1);
            let mut current = sums.norm(&signs)?;
            loop {
                let mut step: Option<(usize, f64)> = None;
                for k in 1..n {
                    signs.flip(k);
                    let v = sums.norm(&signs)?;
                    signs.flip(k);
                    if v > current * (1.0 + 1e-14) && step.is_none_or(|(_, b)| v > b) {
                        step = Some((k, v));
                    }
                }
                let Some((k, v)) = step else { break };
                signs.flip(k);
                current = v;
            }
            Ok((signs, current))
        })
        .collect::<Result<_>>()?;
    let (signs, value) = runs
        .into_iter()
        .fold((SignVector::all_plus(n), f64::NEG_INFINITY), |b, x| {
            if x.1 > b.1 {
                x
            } else {
                b
            }
        });
    Ok(SignMax {
        value,
        signs,
        exact: false,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummingRatio {
    /// `‖(‖f_k‖_target)_k‖_seq`
    pub numerator: f64,
    /// `max_ε ‖Σ ε_k f_k‖_domain`
    pub denominator: f64,
    pub ratio: f64,
    /// False when the denominator is only a lower bound.
    pub exact: bool,
}

/// Ratio whose supremum over families is the summing constant of the
/// inclusion `domain ⊂ target` with respect to the sequence space `seq`.
/// The right-hand side uses the identity
/// `sup_{‖x*‖<=1} Σ |x*(f_k)| = max_ε ‖Σ ε_k f_k‖` valid in function lattices.
pub fn summing_ratio(
    f: &[StepFn],
    seq: &SpaceSpec,
    target: &SpaceSpec,
    domain: &SpaceSpec,
) -> Result<SummingRatio> {
    if !seq.is_sequence_space() {
        return Err(Error::InvalidSpace(format!("`{seq}` is not a sequence space")));
    }
    if f.iter().all(StepFn::is_zero) {
        return Err(Error::InvalidArgument("all functions vanish".into()));
    }
    let norms = f.iter().map(|g| target.norm(g)).collect::<Result<Vec<_>>>()?;
    let numerator = seq.seq_norm(&SeqVec::new(norms)?)?;
    let m = max_sign_norm(f, domain)?;
    Ok(SummingRatio {
        numerator,
        denominator: m.value,
        ratio: numerator / m.value,
        exact: m.exact,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicatorFamily {
    pub k: usize,
    pub p: f64,
    pub q: f64,
    pub ratio: SummingRatio,
    /// `k^{1/p - 1/q}`
    pub expected: f64,
}

/// The family `χ_{[(i-1)/k, i/k)}`: `max_ε ‖Σ ε f_i‖_{X_p} = 1` while
/// `(Σ ‖f_i‖_{L^q}^p)^{1/p} = k^{1/p - 1/q}`, so `X_p ⊂ L^q` is not
/// `(p,1)`-summing for `q > p`.
pub fn indicator_family(k: usize, p: f64, q: f64) -> Result<IndicatorFamily> {
    if k < 1 || !(1.0 < p && p < q) {
        return Err(Error::InvalidArgument(format!(
            "need k >= 1 and 1 < p < q, got k = {k}, p = {p}, q = {q}"
        )));
    }
    let f = (0..k)
        .map(|i| StepFn::indicator(i as f64 / k as f64, (i + 1) as f64 / k as f64))
        .collect::<Result<Vec<_>>>()?;
    let ratio = summing_ratio(
        &f,
        &SpaceSpec::SeqLq { q: p },
        &SpaceSpec::lp(q),
        &SpaceSpec::xp(p),
    )?;
    Ok(IndicatorFamily {
        k,
        p,
        q,
        ratio,
        expected: (k as f64).powf(1.0 / p - 1.0 / q),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rademacher::rademacher_fn;

    #[test]
    fn disjoint_supports() {
        let f = [
            StepFn::new(vec![0.0, 0.5, 1.0], vec![2.0, 0.0]).unwrap(),
            StepFn::new(vec![0.0, 0.5, 1.0], vec![0.0, -1.0]).unwrap(),
        ];
        let xp = SpaceSpec::xp(1.5);
        let m = max_sign_norm(&f, &xp).unwrap();
        let abs_sum = StepFn::new(vec![0.0, 0.5, 1.0], vec![2.0, 1.0]).unwrap();
        assert_eq!(m.value, xp.norm(&abs_sum).unwrap());
        assert!(m.exact);
    }

    #[test]
    fn identical_functions() {
        let g = StepFn::new(vec![0.0, 0.3, 1.0], vec![1.0, -0.5]).unwrap();
        let f = vec![g.clone(); 5];
        for space in [SpaceSpec::xp(1.5), SpaceSpec::exp_l(2.0), SpaceSpec::lp(2.0)] {
            let m = max_sign_norm(&f, &space).unwrap();
            let want = 5.0 * space.norm(&g).unwrap();
            assert!((m.value - want).abs() < 1e-12 * want);
            assert_eq!(m.signs, SignVector::all_plus(5));
        }
    }

    #[test]
    fn orthogonal_rademachers_in_l2() {
        let f = [rademacher_fn(1).unwrap(), rademacher_fn(2).unwrap()];
        let m = max_sign_norm(&f, &SpaceSpec::lp(2.0)).unwrap();
        assert!((m.value - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn heuristic_path_is_a_lower_bound() {
        let g = StepFn::constant(1.0);
        let f = vec![g; 6];
        let cfg = MaxSignConfig {
            exhaustive_max: 3,
            restarts: 4,
            seed: 1,
        };
        let m = max_sign_norm_with(&f, &SpaceSpec::lp(1.0), &cfg).unwrap();
        assert!(!m.exact);
        assert!((m.value - 6.0).abs() < 1e-12);
    }

    #[test]
    fn single_function_ratio() {
        let f = [StepFn::new(vec![0.0, 0.25, 1.0], vec![3.0, 1.0]).unwrap()];
        let r = summing_ratio(&f, &SpaceSpec::SeqLq { q: 1.5 }, &SpaceSpec::lp(2.0), &SpaceSpec::xp(1.5))
            .unwrap();
        let want = SpaceSpec::lp(2.0).norm(&f[0]).unwrap() / SpaceSpec::xp(1.5).norm(&f[0]).unwrap();
        assert!((r.ratio - want).abs() < 1e-14 * want);
    }

    #[test]
    fn indicator_family_values() {
        assert!((indicator_family(1, 1.5, 2.0).unwrap().ratio.ratio - 1.0).abs() < 1e-15);
        let e = indicator_family(16, 1.5, 2.0).unwrap();
        assert!((e.ratio.ratio - 16f64.powf(1.0 / 6.0)).abs() < 1e-12);
        assert!((e.ratio.denominator - 1.0).abs() < 1e-15);
        // doubling along the power law
        let k2 = 2f64.powf(1.0 / (1.0 / 1.5 - 1.0 / 2.0)) as usize;
        assert_eq!(k2, 64);
        let e2 = indicator_family(16 * k2, 1.5, 2.0).unwrap();
        assert!((e2.ratio.ratio / e.ratio.ratio - 2.0).abs() < 1e-9);
        assert!(indicator_family(4, 2.0, 1.5).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(max_sign_norm(&[], &SpaceSpec::lp(1.0)).is_err());
        let f = [StepFn::zero()];
        assert!(summing_ratio(&f, &SpaceSpec::SeqLq { q: 2.0 }, &SpaceSpec::Linf, &SpaceSpec::Linf).is_err());
    }
}
