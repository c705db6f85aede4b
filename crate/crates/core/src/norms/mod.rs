//! Norm engines for rearrangement-invariant spaces on step functions.
//!
//! All function norms go through the decreasing rearrangement, so they
//! are rearrangement invariant by construction.

mod space;
mod weight;

pub use space::SpaceSpec;
pub use weight::WeightFn;

use serde::{Deserialize, Serialize};

use crate::numeric::{golden_section_max, Compensated};
use crate::stepfn::{SeqVec, StepFn};

/// Golden-section steps per cell when refining a Marcinkiewicz supremum.
pub const MARCINKIEWICZ_GOLDEN_STEPS: usize = 200;

/// Relative width at which the Luxemburg bisection stops.
const LUXEMBURG_RTOL: f64 = 1e-15;

/// `L^p` norm; `p = f64::INFINITY` gives the sup norm.
pub fn lp_norm(f: &StepFn, p: f64) -> f64 {
    let m = f.sup_norm();
    if p == f64::INFINITY || m == 0.0 {
        return m;
    }
    let mut acc = Compensated::default();
    for (lo, hi, v) in f.cells() {
        if v != 0.0 {
            acc.add((v.abs() / m).powf(p) * (hi - lo));
        }
    }
    m * acc.value().powf(1.0 / p)
}

/// Lorentz norm `(∫ (f*)^p dw)^{1/p}` as an exact Stieltjes sum over the
/// cells of `f*`.
pub fn lorentz_norm(f: &StepFn, p: f64, w: &WeightFn) -> f64 {
    let r = f.rearrange();
    let m = r.values()[0];
    if m == 0.0 {
        return 0.0;
    }
    let mut acc = Compensated::default();
    let mut w_lo = 0.0;
    for (_, hi, v) in r.cells() {
        let w_hi = w.eval(hi);
        if v != 0.0 {
            acc.add((v / m).powf(p) * (w_hi - w_lo));
        }
        w_lo = w_hi;
    }
    m * acc.value().powf(1.0 / p)
}

/// `sup_t (φ(t)/t) ∫_0^t f*`.
pub fn marcinkiewicz_norm(f: &StepFn, phi: &WeightFn) -> f64 {
    marcinkiewicz_sup(f, phi).0
}

/// Marcinkiewicz norm together with the point `t` where it is attained.
///
/// Every breakpoint of `f*` is evaluated; cells whose upper bound
/// `(φ(lo)/lo)·H(hi)` beats the running best are then refined by
/// golden-section search on `φ(t)·(c + B/t)`, where `H(t) = B + c t` on
/// the cell.
pub fn marcinkiewicz_sup(f: &StepFn, phi: &WeightFn) -> (f64, f64) {
    let r = f.rearrange();
    let mut best = (0.0, 1.0);
    // (lo, hi, c, head integral at lo)
    let mut cells = Vec::with_capacity(r.num_cells());
    let mut head = Compensated::default();
    for (lo, hi, c) in r.cells() {
        let at_lo = head.value();
        head.add(c * (hi - lo));
        let h = head.value();
        let val = phi.eval(hi) * (h / hi);
        if val > best.0 {
            best = (val, hi);
        }
        cells.push((lo, hi, c, at_lo));
    }
    for &(lo, hi, c, at_lo) in &cells {
        let intercept = at_lo - c * lo;
        if lo == 0.0 || intercept <= 0.0 {
            // φ(t)·c is maximized at the right end
            continue;
        }
        let upper = phi.eval(lo) / lo * (at_lo + c * (hi - lo));
        if upper <= best.0 {
            continue;
        }
        let g = |t: f64| phi.eval(t) * (c + intercept / t);
        let (t, val) = golden_section_max(g, lo, hi, MARCINKIEWICZ_GOLDEN_STEPS, 1e-16 * hi);
        if val > best.0 {
            best = (val, t);
        }
    }
    best
}

/// Luxemburg norm of `Exp L^α`, i.e. for the Young function `e^{u^α} - 1`.
///
/// Solves `Σ_i (e^{(|v_i|/λ)^α} - 1) m_i = 1` by bisection on the bracket
/// `[‖f‖_∞ / (ln(1 + 1/m_min))^{1/α}, ‖f‖_∞ (ln 2)^{-1/α}]`.
pub fn luxemburg_norm(f: &StepFn, alpha: f64) -> f64 {
    let sup = f.sup_norm();
    if sup == 0.0 {
        return 0.0;
    }
    let cells: Vec<(f64, f64)> = f
        .cells()
        .filter(|&(_, _, v)| v != 0.0)
        .map(|(lo, hi, v)| (v.abs(), hi - lo))
        .collect();
    let modular = |lambda: f64| -> f64 {
        let mut acc = Compensated::default();
        for &(v, m) in &cells {
            acc.add(((v / lambda).powf(alpha)).exp_m1() * m);
        }
        acc.value()
    };
    let m_min = f.min_cell_measure();
    let mut lo = sup / (1.0 / m_min).ln_1p().powf(1.0 / alpha);
    let mut hi = sup / std::f64::consts::LN_2.powf(1.0 / alpha);
    if hi <= lo {
        return hi;
    }
    for _ in 0..200 {
        if hi - lo <= LUXEMBURG_RTOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if modular(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The two equivalent forms of the weak-`ℓ^q` quasinorm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeakVariant {
    /// `sup_k k^{1/q} a*_k`
    Sup,
    /// `sup_k k^{-1/q} Σ_{i≤k} a*_i`
    Average,
}

pub fn weak_seq_norm(a: &SeqVec, q: f64, variant: WeakVariant) -> f64 {
    let s = a.rearrange();
    let mut best: f64 = 0.0;
    let mut partial = Compensated::default();
    for (idx, &v) in s.as_slice().iter().enumerate() {
        let k = (idx + 1) as f64;
        let cand = match variant {
            WeakVariant::Sup => k.powf(1.0 / q) * v,
            WeakVariant::Average => {
                partial.add(v);
                k.powf(-1.0 / q) * partial.value()
            }
        };
        best = best.max(cand);
    }
    best
}

/// `ℓ^q` norm of a finite sequence (`q = ∞` allowed).
pub fn lq_seq_norm(a: &SeqVec, q: f64) -> f64 {
    let m = a.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if q == f64::INFINITY || m == 0.0 {
        return m;
    }
    let s: f64 = a.as_slice().iter().map(|v| (v.abs() / m).powf(q)).sum();
    m * s.powf(1.0 / q)
}

#[cfg(test)]
mod tests {
    use super::*;

    const W15: WeightFn = WeightFn::W { p: 1.5 };

    fn close(a: f64, b: f64, rtol: f64) -> bool {
        (a - b).abs() <= rtol * b.abs().max(1e-300)
    }

    #[test]
    fn lp_examples() {
        let q = StepFn::indicator(0.0, 0.25).unwrap();
        assert!(close(lp_norm(&q, 2.0), 0.5, 1e-15));
        let f = StepFn::uniform(&[3.0, 2.0, 1.0]).unwrap();
        assert!(close(lp_norm(&f, 1.0), f.l1_norm(), 1e-15));
        assert!(close(lp_norm(&f, 3.0), 12f64.powf(1.0 / 3.0), 1e-14));
        assert_eq!(lp_norm(&f, f64::INFINITY), 3.0);
    }

    #[test]
    fn lorentz_fundamental_function() {
        for t in [0.01, 0.25, 0.5, 0.9] {
            let chi = StepFn::indicator(0.0, t).unwrap();
            let expect = (1.0 - t.ln()).powf(-0.5).powf(1.0 / 1.5);
            assert!(close(lorentz_norm(&chi, 1.5, &W15), expect, 1e-14));
        }
        assert!(close(lorentz_norm(&StepFn::constant(1.0), 1.5, &W15), 1.0, 1e-15));
    }

    #[test]
    fn lorentz_kernel_row_is_at_most_one() {
        // value W(a)^{-1/p} on [0, b) with b <= a
        let (a, b) = (0.05f64, 1.0 / 21.0);
        let wa = W15.eval(a);
        let f = StepFn::new(vec![0.0, b, 1.0], vec![wa.powf(-1.0 / 1.5), 0.0]).unwrap();
        let expect = (W15.eval(b) / wa).powf(1.0 / 1.5);
        assert!(close(lorentz_norm(&f, 1.5, &W15), expect, 1e-14));
        assert!(expect <= 1.0);
    }

    #[test]
    fn marcinkiewicz_examples() {
        let phi = WeightFn::PhiP { p: 1.5 };
        for a in [0.01, 0.3, 0.75] {
            let chi = StepFn::indicator(0.0, a).unwrap();
            assert!(close(marcinkiewicz_norm(&chi, &phi), phi.eval(a), 1e-12));
        }
        assert!(close(marcinkiewicz_norm(&StepFn::constant(1.0), &phi), 1.0, 1e-15));
        let f = StepFn::uniform(&[0.3, -2.0, 1.0, 0.0]).unwrap();
        assert!(close(marcinkiewicz_norm(&f, &WeightFn::Identity), f.l1_norm(), 1e-14));
        assert_eq!(marcinkiewicz_norm(&StepFn::zero(), &phi), 0.0);
    }

    #[test]
    fn marcinkiewicz_matches_dense_scan() {
        let f = StepFn::new(
            vec![0.0, 0.013, 0.2, 0.21, 0.6, 1.0],
            vec![5.0, 0.4, 3.0, 1.0, -0.2],
        )
        .unwrap();
        for phi in [WeightFn::PhiP { p: 1.3 }, WeightFn::Power { beta: 0.4 }, W15] {
            let r = f.rearrange();
            let dense = (1..=200_000)
                .map(|j| {
                    let t = j as f64 / 200_000.0;
                    phi.eval(t) / t * r.head_integral_sorted(t)
                })
                .fold(0.0f64, f64::max);
            let got = marcinkiewicz_norm(&f, &phi);
            assert!(got >= dense * (1.0 - 1e-12));
            assert!(close(got, dense, 1e-6));
        }
    }

    #[test]
    fn luxemburg_closed_form() {
        for a in [1.0, 0.5, 0.25, 1.0 / 64.0] {
            for alpha in [1.0, 2.0, 3.0] {
                let chi = StepFn::indicator(0.0, a).unwrap();
                let expect = (1.0 / a).ln_1p().powf(-1.0 / alpha);
                assert!(close(luxemburg_norm(&chi, alpha), expect, 1e-12));
            }
        }
        assert_eq!(luxemburg_norm(&StepFn::zero(), 2.0), 0.0);
    }

    #[test]
    fn luxemburg_root_solves_modular() {
        let f = StepFn::new(vec![0.0, 0.1, 0.5, 1.0], vec![3.0, -1.0, 0.25]).unwrap();
        let lam = luxemburg_norm(&f, 2.0);
        let m: f64 = f
            .cells()
            .map(|(lo, hi, v)| ((v / lam).powi(2)).exp_m1() * (hi - lo))
            .sum();
        assert!((m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weak_seq_examples() {
        let s = |v: &[f64]| SeqVec::new(v.to_vec()).unwrap();
        let e1 = s(&[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(weak_seq_norm(&e1, 2.0, WeakVariant::Sup), 1.0);
        assert_eq!(weak_seq_norm(&e1, 2.0, WeakVariant::Average), 1.0);
        let ones = s(&[1.0; 5]);
        assert!(close(weak_seq_norm(&ones, 3.0, WeakVariant::Sup), 5f64.powf(1.0 / 3.0), 1e-15));
        assert!(close(weak_seq_norm(&s(&[1.0, 1.0]), 2.0, WeakVariant::Average), 2f64.sqrt(), 1e-15));
        assert_eq!(weak_seq_norm(&s(&[]), 2.0, WeakVariant::Sup), 0.0);
    }

    #[test]
    fn lq_seq_examples() {
        let a = SeqVec::new(vec![3.0, -4.0]).unwrap();
        assert!(close(lq_seq_norm(&a, 2.0), 5.0, 1e-15));
        assert_eq!(lq_seq_norm(&a, f64::INFINITY), 4.0);
        assert!(close(lq_seq_norm(&a, 1.0), 7.0, 1e-15));
    }
}
