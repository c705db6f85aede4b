use serde::{Deserialize, Serialize};

use super::eta::{select_eta, MAX_ETA_FUNCTIONS};
use super::grouping::group_indices;
use super::khintchine::{khintchine_signs, SearchConfig};
use super::pigeonhole::Branch;
use super::SignVector;
use crate::error::{Error, Result};
use crate::rademacher::{dyadic, head_estimate_rhs};
use crate::stepfn::StepFn;

/// Certified constant `1/(9√2)`.
///
/// Constant chase, with `S = Σ_{k≤i} a_k`, `σ = (Σ_{k>i} a_k²)^{1/2}` and
/// `R = S + √i σ` the bracket of the explicit right-hand side:
///
/// * sign-cell selection with `d = 1/3` plus the group bound
///   `∫|y_l| >= (Σ_{A_l} a_k²)^{1/2}/√2` give
///   `lhs >= 2^{-i}/(3√2) · Σ_l (Σ_{A_l} a_k²)^{1/2}`;
/// * if `S >= √i σ / 2` then, since `l ∈ A_l`, `lhs >= 2^{-i} S/(3√2)` and
///   `R <= 3S`, so `lhs/(2^{-i}R) >= 1/(3√2) · 1/3`;
/// * otherwise every tail coefficient is at most `σ/(2√i)`, each group
///   carries at least `3σ²/(4i)`, `lhs >= 2^{-i} √3 √i σ/(6√2)` and
///   `R < 3√i σ/2`, so the ratio is at least `√3/(6√2) · 2/3`.
///
/// The smaller of the two is `1/(9√2)`.
pub const GAMMA_PRIME: f64 = std::f64::consts::FRAC_1_SQRT_2 / 9.0;

/// Sign-cell parameter used by the pipeline.
pub const PIPELINE_D: f64 = 1.0 / 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub d: f64,
    pub search: SearchConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            d: PIPELINE_D,
            search: SearchConfig::default(),
        }
    }
}

/// Coefficient regime the run fell into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientCase {
    /// `Σ_{k≤i} a_k >= (√i/2) σ`
    HeadDominant,
    /// `Σ_{k≤i} a_k < (√i/2) σ`
    TailDominant,
    /// `i >= n`: the head sum is everything.
    Saturated,
}

/// Audit trail of one [`select_signs`] run. Indices refer to the
/// caller's input order (0-based).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionCertificate {
    pub i: usize,
    pub tau: f64,
    /// Input indices of the nonzero functions, by decreasing `‖g_k‖_1`.
    pub order: Vec<usize>,
    /// `‖g_k‖_1` in the same order.
    pub sorted_norms: Vec<f64>,
    /// `A_1, …, A_i`; `groups[l]` contains `order[l]`.
    pub groups: Vec<Vec<usize>>,
    /// Khintchine signs, indexed like the input (zeros carry `+1`).
    pub delta: SignVector,
    /// One sign per group.
    pub eta: SignVector,
    pub branch: Option<Branch>,
    pub case: CoefficientCase,
    pub d: f64,
    /// `∫_0^τ (Σ ε_k g_k)^*`
    pub lhs: f64,
    /// `2^{-i}(Σ_{k≤i} a*_k + √i (Σ_{k>i} (a*_k)²)^{1/2})`
    pub rhs_formula: f64,
    pub gamma_emp: f64,
    pub gamma_prime: f64,
}

/// Smallest `i >= 1` with `2^{-i} <= τ`, i.e. `τ` rounded down to a dyadic
/// level.
pub fn dyadic_level(tau: f64) -> Result<usize> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::InvalidArgument(format!("τ must lie in (0, 1], got {tau}")));
    }
    let mut i = 1;
    while dyadic(i) > tau {
        i += 1;
    }
    Ok(i)
}

/// [`select_signs`] at the dyadic level below `τ`.
pub fn select_signs_tau(
    g: &[StepFn],
    tau: f64,
    config: &PipelineConfig,
) -> Result<(SignVector, SelectionCertificate)> {
    select_signs(g, dyadic_level(tau)?, config)
}

/// Chooses `ε` with `∫_0^{2^{-i}} (Σ ε_k g_k)^* >= γ' · rhs_formula` and
/// returns it with a checked certificate.
///
/// Zero functions get `+1` and are left out. For `i < n` the sorted
/// coefficients are grouped, each group gets Khintchine signs `δ`, the
/// group sums `y_l` get sign-cell signs `η'`, and `ε_k = δ_k η'_l` for
/// `k ∈ A_l`. For `i >= n` the sign-cell selection runs on the functions
/// themselves at level `n`; concavity of the head integral carries the
/// bound down to `2^{-i}`. The overall sign is normalized so that the
/// largest function gets `+1`.
pub fn select_signs(
    g: &[StepFn],
    i: usize,
    config: &PipelineConfig,
) -> Result<(SignVector, SelectionCertificate)> {
    if i < 1 {
        return Err(Error::InvalidArgument("level i must be >= 1".into()));
    }
    let norms: Vec<f64> = g.iter().map(StepFn::l1_norm).collect();
    let mut order: Vec<usize> = (0..g.len()).filter(|&k| norms[k] > 0.0).collect();
    if order.is_empty() {
        return Err(Error::InvalidArgument(
            "sign selection needs at least one nonzero function".into(),
        ));
    }
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]).then(x.cmp(&y)));
    let n = order.len();
    let a: Vec<f64> = order.iter().map(|&k| norms[k]).collect();
    let tau = dyadic(i);

    let mut delta = SignVector::all_plus(g.len());
    let (groups, case) = if i >= n {
        if n > MAX_ETA_FUNCTIONS {
            return Err(Error::SizeLimit(format!(
                "{n} nonzero functions exceed the sign-cell cap of {MAX_ETA_FUNCTIONS}"
            )));
        }
        let groups: Vec<Vec<usize>> = order.iter().map(|&k| vec![k]).collect();
        (groups, CoefficientCase::Saturated)
    } else {
        if i > MAX_ETA_FUNCTIONS {
            return Err(Error::SizeLimit(format!(
                "level {i} exceeds the sign-cell cap of {MAX_ETA_FUNCTIONS}"
            )));
        }
        let normalized: Vec<StepFn> = order
            .iter()
            .zip(&a)
            .map(|(&k, &ak)| g[k].scale(1.0 / ak))
            .collect();
        let sorted_groups = group_indices(&a, i)?;
        for (l, members) in sorted_groups.iter().enumerate() {
            let search = SearchConfig {
                seed: config.search.seed.wrapping_add(l as u64),
                ..config.search
            };
            let res = khintchine_signs(&a, &normalized, members, &search)?;
            for (pos, &m) in members.iter().enumerate() {
                delta.set(order[m], res.delta.get(pos));
            }
        }
        let head: f64 = a[..i].iter().sum();
        let sigma = a[i..].iter().map(|x| x * x).sum::<f64>().sqrt();
        let case = if head >= 0.5 * (i as f64).sqrt() * sigma {
            CoefficientCase::HeadDominant
        } else {
            CoefficientCase::TailDominant
        };
        let groups = sorted_groups
            .into_iter()
            .map(|grp| grp.into_iter().map(|m| order[m]).collect())
            .collect();
        (groups, case)
    };

    let y: Vec<StepFn> = groups
        .iter()
        .map(|grp: &Vec<usize>| {
            let funcs: Vec<StepFn> = grp.iter().map(|&k| g[k].clone()).collect();
            let coeffs: Vec<f64> = grp.iter().map(|&k| delta.get(k) as f64).collect();
            StepFn::linear_combination(&funcs, &coeffs)
        })
        .collect::<Result<_>>()?;
    let selection = select_eta(&y, config.d)?;
    let mut eta = selection.eta;

    let mut eps = SignVector::all_plus(g.len());
    for (l, grp) in groups.iter().enumerate() {
        for &k in grp {
            eps.set(k, delta.get(k) * eta.get(l));
        }
    }
    if eps.get(order[0]) < 0 {
        for &k in &order {
            eps.flip(k);
        }
        eta.negate();
    }

    let combined = StepFn::linear_combination(g, &eps.to_f64())?;
    let lhs = combined.head_integral(tau)?;
    let rhs_formula = head_estimate_rhs(&a, i);
    let gamma_emp = lhs / rhs_formula;
    if !(gamma_emp >= GAMMA_PRIME - 1e-12) {
        return Err(Error::CertificationFailed(format!(
            "head integral {lhs} is only {gamma_emp} times the explicit bound {rhs_formula} \
             (needs {GAMMA_PRIME}) at level {i}"
        )));
    }
    let cert = SelectionCertificate {
        i,
        tau,
        order,
        sorted_norms: a,
        groups,
        delta,
        eta,
        branch: selection.branch,
        case,
        d: config.d,
        lhs,
        rhs_formula,
        gamma_emp,
        gamma_prime: GAMMA_PRIME,
    };
    Ok((eps, cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rademacher::{head_estimate, rademacher_fn};
    use crate::stepfn::SeqVec;

    #[test]
    fn constant_chase() {
        let head_case = (1.0 / (3.0 * 2f64.sqrt())) * (1.0 / 3.0);
        let tail_case = (3f64.sqrt() / (6.0 * 2f64.sqrt())) * (2.0 / 3.0);
        assert!((head_case.min(tail_case) - GAMMA_PRIME).abs() < 1e-16);
        assert!((GAMMA_PRIME - 1.0 / (9.0 * 2f64.sqrt())).abs() < 1e-16);
    }

    #[test]
    fn dyadic_rounding() {
        assert_eq!(dyadic_level(1.0).unwrap(), 1);
        assert_eq!(dyadic_level(0.5).unwrap(), 1);
        assert_eq!(dyadic_level(0.3).unwrap(), 2);
        assert_eq!(dyadic_level(0.25).unwrap(), 2);
        assert!(dyadic_level(0.0).is_err());
    }

    #[test]
    fn single_function() {
        let g = [StepFn::new(vec![0.0, 0.2, 1.0], vec![-3.0, 1.0]).unwrap()];
        for i in 1..5 {
            let (eps, cert) = select_signs(&g, i, &PipelineConfig::default()).unwrap();
            assert_eq!(eps.as_slice(), &[1]);
            assert!(cert.lhs >= dyadic(i) * g[0].l1_norm() - 1e-15);
            assert!(cert.gamma_emp >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn proportional_constants() {
        let a = [3.0, 2.0, 1.5, 0.5];
        let g: Vec<StepFn> = a.iter().map(|&x| StepFn::constant(x)).collect();
        for i in 1..6 {
            let (eps, cert) = select_signs(&g, i, &PipelineConfig::default()).unwrap();
            let h = StepFn::linear_combination(&g, &eps.to_f64()).unwrap();
            assert!((h.head_integral(dyadic(i)).unwrap() - cert.lhs).abs() < 1e-15);
            assert!(cert.gamma_emp >= GAMMA_PRIME);
        }
        let (eps, _) = select_signs(&g, 6, &PipelineConfig::default()).unwrap();
        assert_eq!(eps, SignVector::all_plus(4));
    }

    #[test]
    fn scaled_rademachers_match_head_estimate() {
        let a = [1.0, 0.8, 0.8, 0.5, 0.3];
        let g: Vec<StepFn> = a
            .iter()
            .enumerate()
            .map(|(k, &x)| rademacher_fn(k + 1).unwrap().scale(x))
            .collect();
        for i in 1..=6 {
            let (eps, cert) = select_signs(&g, i, &PipelineConfig::default()).unwrap();
            let signed: Vec<f64> = a.iter().zip(eps.to_f64()).map(|(x, s)| x * s).collect();
            let sides = head_estimate(&SeqVec::new(signed).unwrap(), i).unwrap();
            assert!((sides.lhs - cert.lhs).abs() < 1e-14);
        }
    }

    #[test]
    fn zeros_are_skipped() {
        let g = [
            StepFn::zero(),
            StepFn::uniform(&[1.0, -1.0, 2.0]).unwrap(),
            StepFn::zero(),
            StepFn::indicator(0.1, 0.4).unwrap(),
        ];
        let (eps, cert) = select_signs(&g, 1, &PipelineConfig::default()).unwrap();
        assert_eq!(eps.get(0), 1);
        assert_eq!(eps.get(2), 1);
        assert_eq!(cert.order, vec![1, 3]);
        assert!(select_signs(&[StepFn::zero()], 1, &PipelineConfig::default()).is_err());
        assert!(select_signs(&g, 0, &PipelineConfig::default()).is_err());
    }
}
