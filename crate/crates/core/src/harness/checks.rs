use serde::{Deserialize, Serialize};

use super::summing::{max_sign_norm, SignMax};
use crate::error::{Error, Result};
use crate::norms::{lp_norm, marcinkiewicz_norm, weak_seq_norm, SpaceSpec, WeakVariant, WeightFn};
use crate::rademacher::{dyadic, rademacher_sum};
use crate::signselect::{select_signs, PipelineConfig, SignVector};
use crate::stepfn::{Refinement, SeqVec, StepFn};

/// Largest family accepted by the exhaustive inequality checks.
pub const MAX_CHECK_FAMILY: usize = 14;

fn check_family(f: &[StepFn]) -> Result<()> {
    if f.is_empty() || f.len() > MAX_CHECK_FAMILY {
        return Err(Error::SizeLimit(format!(
            "checks take 1..={MAX_CHECK_FAMILY} functions, got {}",
            f.len()
        )));
    }
    Ok(())
}

fn l1_norms(f: &[StepFn]) -> Result<SeqVec> {
    SeqVec::new(f.iter().map(StepFn::l1_norm).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RademacherDomination {
    /// `‖Σ ‖f_k‖_1 r_k‖_{M_φ}`
    pub lhs: f64,
    /// `max_ε ‖Σ ε_k f_k‖_{M_φ}`
    pub rhs: f64,
    pub c_emp: f64,
    pub max_signs: SignVector,
    /// Dyadic level maximizing `(φ(τ)/τ) ∫_0^τ (Σ a_k r_k)^*`, `τ = 2^{-i}`.
    pub level: usize,
    /// Signs chosen by the selection pipeline at `level`.
    pub eps: SignVector,
    /// `∫_0^τ (Σ ε f)^* / ∫_0^τ (Σ a r)^*` at `level`.
    pub gamma: f64,
    /// `(2/γ) ‖Σ ε_k f_k‖_{M_φ}`
    pub chain_bound: f64,
    pub chain_ok: bool,
}

/// Both sides of `‖Σ ‖f_k‖_1 r_k‖_{M_φ} <= c max_ε ‖Σ ε_k f_k‖_{M_φ}`.
///
/// The chain check follows the argument behind the inequality: `φ(t)/t`
/// is nonincreasing and head integrals are concave, so the left side is at
/// most twice its largest dyadic sample; at that level the pipeline signs
/// recover a fraction `γ` of the Rademacher head integral, hence
/// `lhs <= (2/γ) ‖Σ ε f‖_{M_φ}`.
pub fn rademacher_domination_check(f: &[StepFn], phi: &WeightFn) -> Result<RademacherDomination> {
    check_family(f)?;
    phi.validate()?;
    if !phi.is_quasiconcave() {
        return Err(Error::InvalidArgument(format!("`{phi}` is not quasiconcave")));
    }
    let a = l1_norms(f)?;
    let rad = rademacher_sum(&a)?;
    let lhs = marcinkiewicz_norm(&rad, phi);
    let m: SignMax = max_sign_norm(f, &SpaceSpec::Marcinkiewicz { weight: *phi })?;

    let n = f.len();
    let mut level = 1;
    let mut best = f64::NEG_INFINITY;
    for i in 1..=n {
        let tau = dyadic(i);
        let d = phi.eval(tau) / tau * rad.head_integral(tau)?;
        if d > best {
            best = d;
            level = i;
        }
    }
    let tau = dyadic(level);
    let (eps, _) = select_signs(f, level, &PipelineConfig::default())?;
    let sum = StepFn::linear_combination(f, &eps.to_f64())?;
    let gamma = sum.head_integral(tau)? / rad.head_integral(tau)?;
    let chain_bound = 2.0 / gamma * marcinkiewicz_norm(&sum, phi);
    Ok(RademacherDomination {
        lhs,
        rhs: m.value,
        c_emp: lhs / m.value,
        max_signs: m.signs,
        level,
        eps,
        gamma,
        chain_bound,
        chain_ok: lhs <= chain_bound * (1.0 + 1e-12),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakSummingCheck {
    pub q: f64,
    /// `sup_k k^{-1/q} Σ_{i≤k} (‖f‖_1)^*_i`
    pub lhs: f64,
    /// `max_ε ‖Σ ε_k f_k‖_{Exp L^q}`
    pub rhs: f64,
    pub ratio: f64,
}

/// Both sides of the weak-`ℓ^q` summing estimate into `L^1` with
/// `q = p/(p-1)` and domain `Exp L^q`.
pub fn weak_summing_check(f: &[StepFn], p: f64) -> Result<WeakSummingCheck> {
    check_family(f)?;
    if !(p > 1.0) {
        return Err(Error::InvalidArgument(format!("p must exceed 1, got {p}")));
    }
    let q = p / (p - 1.0);
    let lhs = weak_seq_norm(&l1_norms(f)?, q, WeakVariant::Average);
    let rhs = max_sign_norm(f, &SpaceSpec::exp_l(q))?.value;
    Ok(WeakSummingCheck {
        q,
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcavityCheck {
    /// `‖(‖f_k‖_p)_k‖_{ℓ^{q,∞}}`
    pub lhs: f64,
    /// `‖ t ↦ ‖(f_k(t))_k‖_{ℓ^{q,∞}} ‖_p`
    pub rhs: f64,
    pub ratio: f64,
}

/// Both sides of the `ℓ^{q,∞}`-concavity estimate for `L^p`, sup-form weak
/// norms, the right side evaluated cell by cell on the common refinement.
pub fn weak_concavity_check(f: &[StepFn], p: f64, q: f64) -> Result<ConcavityCheck> {
    if f.is_empty() {
        return Err(Error::InvalidArgument("empty family".into()));
    }
    if !(1.0 <= p && p < q) {
        return Err(Error::InvalidArgument(format!("need 1 <= p < q, got p = {p}, q = {q}")));
    }
    let norms = SeqVec::new(f.iter().map(|g| lp_norm(g, p)).collect())?;
    let lhs = weak_seq_norm(&norms, q, WeakVariant::Sup);
    let r = Refinement::new(f);
    let pointwise = (0..r.num_cells())
        .map(|j| {
            let v = SeqVec::new(r.columns.iter().map(|c| c[j]).collect())?;
            Ok(weak_seq_norm(&v, q, WeakVariant::Sup))
        })
        .collect::<Result<Vec<_>>>()?;
    let rhs = lp_norm(&r.to_step(pointwise), p);
    Ok(ConcavityCheck {
        lhs,
        rhs,
        ratio: if rhs > 0.0 { lhs / rhs } else { f64::NAN },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signselect::GAMMA_PRIME;

    fn indicators(k: usize) -> Vec<StepFn> {
        (0..k)
            .map(|i| StepFn::indicator(i as f64 / k as f64, (i + 1) as f64 / k as f64).unwrap())
            .collect()
    }

    #[test]
    fn domination_single_function() {
        let f = [StepFn::new(vec![0.0, 0.25, 1.0], vec![2.0, -0.5]).unwrap()];
        let phi = WeightFn::PhiP { p: 1.5 };
        let c = rademacher_domination_check(&f, &phi).unwrap();
        let r1 = crate::rademacher::rademacher_fn(1).unwrap();
        assert!((c.lhs - f[0].l1_norm() * marcinkiewicz_norm(&r1, &phi)).abs() < 1e-12);
        assert!((c.rhs - marcinkiewicz_norm(&f[0], &phi)).abs() < 1e-12);
        assert!(c.chain_ok);
    }

    #[test]
    fn domination_constant_multiples() {
        let a = [3.0, 2.0, 1.0];
        let f: Vec<StepFn> = a.iter().map(|&x| StepFn::constant(x)).collect();
        let phi = WeightFn::W { p: 1.5 };
        let c = rademacher_domination_check(&f, &phi).unwrap();
        assert!((c.rhs - 6.0 * phi.eval(1.0)).abs() < 1e-12);
        let rad = rademacher_sum(&SeqVec::new(a.to_vec()).unwrap()).unwrap();
        assert!((c.lhs - marcinkiewicz_norm(&rad, &phi)).abs() < 1e-15);
        assert!(c.chain_ok);
        assert!(c.gamma >= GAMMA_PRIME);
    }

    #[test]
    fn domination_disjoint_indicators() {
        let f = indicators(4);
        let phi = WeightFn::PhiP { p: 1.5 };
        let c = rademacher_domination_check(&f, &phi).unwrap();
        // Σ|f_k| = 1, so every sign pattern gives φ(1)
        assert!((c.rhs - 1.0).abs() < 1e-12);
        let rad = rademacher_sum(&SeqVec::new(vec![0.25; 4]).unwrap()).unwrap();
        assert!((c.lhs - marcinkiewicz_norm(&rad, &phi)).abs() < 1e-15);
        assert!(c.chain_ok);
    }

    #[test]
    fn weak_summing_shapes() {
        let f = [StepFn::constant(1.0)];
        let c = weak_summing_check(&f, 1.5).unwrap();
        assert!((c.q - 3.0).abs() < 1e-15);
        assert!((c.lhs - 1.0).abs() < 1e-15);
        // ‖1‖_{Exp L^q} = (ln 2)^{-1/q}
        assert!((c.rhs - 2f64.ln().powf(-1.0 / 3.0)).abs() < 1e-12);

        let c = weak_summing_check(&indicators(8), 2.0).unwrap();
        // a* = (1/8,…), sup_k k^{-1/2} k/8 at k = 8
        assert!((c.lhs - 8f64.sqrt() / 8.0).abs() < 1e-15);
        assert!((c.rhs - 2f64.ln().powf(-0.5)).abs() < 1e-12);

        let f: Vec<StepFn> = [2.0, 1.0].iter().map(|&x| StepFn::constant(x)).collect();
        let c = weak_summing_check(&f, 2.0).unwrap();
        assert!((c.lhs - 3.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!((c.rhs - 3.0 * 2f64.ln().powf(-0.5)).abs() < 1e-12);
    }

    #[test]
    fn concavity_single_and_constants() {
        let g = StepFn::new(vec![0.0, 0.5, 1.0], vec![1.0, -3.0]).unwrap();
        let c = weak_concavity_check(std::slice::from_ref(&g), 1.5, 3.0).unwrap();
        assert!((c.lhs - lp_norm(&g, 1.5)).abs() < 1e-15);
        assert!((c.rhs - c.lhs).abs() < 1e-14);

        let a = [3.0, 1.0, 2.0];
        let f: Vec<StepFn> = a.iter().map(|&x| StepFn::constant(x)).collect();
        let c = weak_concavity_check(&f, 1.0, 2.0).unwrap();
        let want = weak_seq_norm(&SeqVec::new(a.to_vec()).unwrap(), 2.0, WeakVariant::Sup);
        assert!((c.lhs - want).abs() < 1e-15 && (c.rhs - want).abs() < 1e-15);
    }

    #[test]
    fn concavity_disjoint_equal_norms() {
        let k = 4;
        let f = indicators(k);
        let c = weak_concavity_check(&f, 1.0, 2.0).unwrap();
        // ‖f_i‖_1 = 1/k, sup_j j^{1/2}/k; pointwise exactly one entry equals 1
        assert!((c.lhs - (k as f64).sqrt() / k as f64).abs() < 1e-15);
        assert!((c.rhs - 1.0).abs() < 1e-15);
    }
}
