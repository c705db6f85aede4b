use serde::{Deserialize, Serialize};

use super::pigeonhole::{pigeonhole_k0, Branch};
use super::SignVector;
use crate::error::{Error, Result};
use crate::numeric::Compensated;
use crate::rademacher::dyadic;
use crate::stepfn::{Refinement, StepFn};

/// Maximum number of functions handled (2^i sign cells are enumerated).
pub const MAX_ETA_FUNCTIONS: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaSelection {
    pub eta: SignVector,
    /// `None` when every input vanishes.
    pub branch: Option<Branch>,
    /// `∫_0^{2^{-i}} (Σ η'_l y_l)^*`
    pub lhs: f64,
    /// `d 2^{-i} Σ ‖y_l‖_1`
    pub rhs: f64,
}

/// Chooses `η'` with `d 2^{-i} Σ_l ‖y_l‖_1 <= ∫_0^{2^{-i}} (Σ_l η'_l y_l)^*`,
/// `i = y.len()`.
///
/// The unit interval is split into the `2^i` cells `E_η` on which
/// `sign y_l = η_l` for all `l` (sign of 0 is `+1`). With the inputs scaled
/// so that `Σ ∫|y_l| = 2^i`, the masses `|E_η|` and the averages of
/// `Σ η_l y_l = Σ |y_l|` over `E_η` satisfy the hypotheses of
/// [`pigeonhole_k0`] with `N = 2^i`; the selected cell gives `η'`.
pub fn select_eta(y: &[StepFn], d: f64) -> Result<EtaSelection> {
    let i = y.len();
    if i == 0 || i > MAX_ETA_FUNCTIONS {
        return Err(Error::InvalidArgument(format!(
            "sign selection needs 1..={MAX_ETA_FUNCTIONS} functions, got {i}"
        )));
    }
    if !(d > 0.0 && d < 0.5) {
        return Err(Error::InvalidArgument(format!("d must lie in (0, 1/2), got {d}")));
    }
    let tau = dyadic(i);
    let total: f64 = y.iter().map(StepFn::l1_norm).sum();
    if total == 0.0 {
        return Ok(EtaSelection {
            eta: SignVector::all_plus(i),
            branch: None,
            lhs: 0.0,
            rhs: 0.0,
        });
    }

    let r = Refinement::new(y);
    let cells = 1usize << i;
    let mut mass = vec![Compensated::default(); cells];
    let mut integral = vec![Compensated::default(); cells];
    for (j, w) in r.breakpoints.windows(2).enumerate() {
        let span = w[1] - w[0];
        let mut mask = 0usize;
        let mut abs_sum = 0.0;
        for (l, col) in r.columns.iter().enumerate() {
            let v = col[j];
            if v < 0.0 {
                mask |= 1 << l;
            }
            abs_sum += v.abs();
        }
        mass[mask].add(span);
        integral[mask].add(span * abs_sum);
    }
    let scale = cells as f64 / total;
    let e: Vec<f64> = mass.iter().map(Compensated::value).collect();
    let c: Vec<f64> = integral
        .iter()
        .zip(&e)
        .map(|(int, &m)| if m > 0.0 { scale * int.value() / m } else { 0.0 })
        .collect();
    let (k0, branch) = pigeonhole_k0(&e, &c, d)?;

    let eta = SignVector::from_mask(i, k0 as u64);
    let h = r.combine(&eta.to_f64());
    let lhs = h.head_integral(tau)?;
    let rhs = d * tau * total;
    if lhs < rhs * (1.0 - 1e-12) {
        return Err(Error::CertificationFailed(format!(
            "sign-cell selection gave {lhs} < {rhs} (branch {branch:?})"
        )));
    }
    Ok(EtaSelection {
        eta,
        branch: Some(branch),
        lhs,
        rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rademacher::rademacher_fn;

    #[test]
    fn single_function_gets_plus() {
        let y = StepFn::new(vec![0.0, 0.3, 1.0], vec![-2.0, 0.5]).unwrap();
        let sel = select_eta(std::slice::from_ref(&y), 1.0 / 3.0).unwrap();
        assert_eq!(sel.eta.len(), 1);
        assert!(sel.lhs >= 0.5 * y.l1_norm() - 1e-15);
    }

    #[test]
    fn two_rademachers() {
        let y = [rademacher_fn(1).unwrap(), rademacher_fn(2).unwrap()];
        let sel = select_eta(&y, 1.0 / 3.0).unwrap();
        // every |E_η| equals 1/N exactly, which is the large-mass alternative
        assert_eq!(sel.branch, Some(Branch::B));
        // on the chosen quarter Σ η y = 2, so the head integral over 1/4 is 1/2
        assert!((sel.lhs - 0.5).abs() < 1e-15);
        assert!((sel.rhs - (1.0 / 3.0) * 0.25 * 2.0).abs() < 1e-15);
    }

    #[test]
    fn zero_inputs_give_all_plus() {
        let sel = select_eta(&[StepFn::zero(), StepFn::zero()], 0.3).unwrap();
        assert_eq!(sel.eta, SignVector::all_plus(2));
        assert_eq!((sel.lhs, sel.rhs, sel.branch), (0.0, 0.0, None));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(select_eta(&[], 0.3).is_err());
        assert!(select_eta(&[StepFn::constant(1.0)], 0.6).is_err());
    }
}
