use serde::{Deserialize, Serialize};

use super::stepfn2d::{Rect, StepFn2d};
use crate::error::{Error, Result};
use crate::numeric::{log_add_exp, Compensated};

/// Largest level accepted by the analytic mode.
pub const MAX_ANALYTIC_LEVEL: u32 = 24;
/// Rectangle budget of the materialized mode.
pub const MATERIALIZE_CAP: u64 = 1_000_000;

/// Above this exponent `⌈e^x⌉` and `e^x` agree to double precision.
const CEIL_EXACT_LIMIT: f64 = 36.0;

/// Parameters of the kernel
/// `K_n(s,t) = Σ_{m=1}^{2^n} W(a_m)^{-1/p} Σ_k χ_{B_{m,k}}(t) χ_{A_{m,k}}(s)`
/// with `a_m = e^{1 - m^{1/θ}}`, `1/b_m = ⌈1/a_m⌉`, `θ = p - 1`.
///
/// `a_m` and `b_m` underflow long before `m = 2^24`, so everything is
/// derived from `ln a_m = 1 - m^{1/θ}` and `ln b_m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnParams {
    pub n: u32,
    pub p: f64,
}

impl KnParams {
    pub fn new(n: u32, p: f64) -> Result<Self> {
        if !(p > 1.0 && p < 2.0) {
            return Err(Error::InvalidArgument(format!("p must lie in (1, 2), got {p}")));
        }
        if !(1..=MAX_ANALYTIC_LEVEL).contains(&n) {
            return Err(Error::SizeLimit(format!(
                "level n must lie in 1..={MAX_ANALYTIC_LEVEL}, got {n}"
            )));
        }
        Ok(KnParams { n, p })
    }

    pub fn theta(&self) -> f64 {
        self.p - 1.0
    }

    /// `2^n`
    pub fn num_strips(&self) -> u64 {
        1u64 << self.n
    }

    /// `m^{1/θ}`
    fn m_pow(&self, m: u64) -> f64 {
        (m as f64).powf(1.0 / self.theta())
    }

    pub fn log_a(&self, m: u64) -> f64 {
        1.0 - self.m_pow(m)
    }

    /// `⌈e^{m^{1/θ} - 1}⌉` when it fits exactly in an `f64` integer.
    pub fn inv_b(&self, m: u64) -> Option<u64> {
        let x = self.m_pow(m) - 1.0;
        (x <= CEIL_EXACT_LIMIT).then(|| x.exp().ceil() as u64)
    }

    pub fn log_b(&self, m: u64) -> f64 {
        match self.inv_b(m) {
            Some(q) => -(q as f64).ln(),
            None => 1.0 - self.m_pow(m),
        }
    }

    /// `a_m` when it is a normal double.
    pub fn a(&self, m: u64) -> Option<f64> {
        let v = self.log_a(m).exp();
        v.is_normal().then_some(v)
    }

    /// `b_m` when it is a normal double.
    pub fn b(&self, m: u64) -> Option<f64> {
        let v = self.log_b(m).exp();
        v.is_normal().then_some(v)
    }

    /// `W(t) = (1 - ln t)^{1-p}` from `ln t`.
    fn w_ln(&self, ln_t: f64) -> f64 {
        (1.0 - ln_t).powf(1.0 - self.p)
    }

    /// `W(a_m) = m^{(1-p)/θ} = 1/m`.
    pub fn w_a(&self, m: u64) -> f64 {
        1.0 / m as f64
    }

    /// Value of `K_n` on strip `m`: `W(a_m)^{-1/p} = m^{1/p}`.
    pub fn value(&self, m: u64) -> f64 {
        (m as f64).powf(1.0 / self.p)
    }

    /// `Σ_m 1/b_m`, saturating.
    pub fn rectangle_count(&self) -> u64 {
        let mut total: u64 = 0;
        for m in 1..=self.num_strips() {
            match self.inv_b(m) {
                Some(q) => total = total.saturating_add(q),
                None => return u64::MAX,
            }
        }
        total
    }
}

/// Analytic description of `K_n`: each row `K_n(·,t)` is the single level
/// `m^{1/p}` on a set of measure `b_m`, and every column `(T K_n)(·,t)`
/// takes the value `m^{1/p}` on a set of measure `b_m 2^{-n}` for each `m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KnAnalytic {
    pub params: KnParams,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub value: f64,
    pub ln_measure: f64,
}

impl KnAnalytic {
    pub fn new(params: KnParams) -> Self {
        KnAnalytic { params }
    }

    /// Distribution of `K_n(·,t)` for `t` in strip `m`.
    pub fn row_distribution(&self, m: u64) -> Level {
        Level {
            value: self.params.value(m),
            ln_measure: self.params.log_b(m),
        }
    }

    /// Distribution of `(T K_n)(·,t)`, identical for every `t`, listed
    /// with values decreasing.
    pub fn column_distribution(&self) -> Vec<Level> {
        let shift = self.params.n as f64 * std::f64::consts::LN_2;
        (1..=self.params.num_strips())
            .rev()
            .map(|m| Level {
                value: self.params.value(m),
                ln_measure: self.params.log_b(m) - shift,
            })
            .collect()
    }

    /// `‖K_n(·,t)‖_{X_p} = (W(b_m)/W(a_m))^{1/p}` for `t` in strip `m`.
    pub fn row_norm(&self, m: u64) -> f64 {
        let p = &self.params;
        (p.w_ln(p.log_b(m)) / p.w_a(m)).powf(1.0 / p.p)
    }

    /// `‖K_n‖_{L^∞(X_p)}` and the strip attaining it.
    pub fn sup_row_norm(&self) -> (f64, u64) {
        (1..=self.params.num_strips())
            .map(|m| (self.row_norm(m), m))
            .fold((f64::NEG_INFINITY, 0), |best, x| if x.0 > best.0 { x } else { best })
    }

    /// `‖(T K_n)(·,t)‖_{X_p}^p` as the Stieltjes sum
    /// `Σ_m v_m^p (W(T_m) - W(T_{m+1}))`, where `T_m = 2^{-n} Σ_{j>=m} b_j` is
    /// the measure where the column is at least `m^{1/p}`. Cumulative
    /// measures are accumulated with log-add-exp.
    pub fn column_norm_p(&self) -> f64 {
        self.column_sums().0
    }

    /// Abel-summed form `Σ_m W(T_m)` of [`Self::column_norm_p`].
    pub fn column_norm_p_abel(&self) -> f64 {
        self.column_sums().1
    }

    fn column_sums(&self) -> (f64, f64) {
        let p = &self.params;
        let mut ln_cum = f64::NEG_INFINITY;
        let mut w_prev = 0.0;
        let mut stieltjes = Compensated::default();
        let mut abel = Compensated::default();
        for lvl in self.column_distribution() {
            ln_cum = log_add_exp(ln_cum, lvl.ln_measure);
            let w = p.w_ln(ln_cum);
            stieltjes.add(lvl.value.powf(p.p) * (w - w_prev));
            abel.add(w);
            w_prev = w;
        }
        (stieltjes.value(), abel.value())
    }

    /// `‖T K_n‖_{L^1(X_p)}`; the column norm does not depend on `t`.
    pub fn column_norm(&self) -> f64 {
        self.column_norm_p().powf(1.0 / self.params.p)
    }
}

/// `Σ_{m=2}^{2^n} ((n+1) ln 2 + m^{1/θ})^{-θ}`, a lower bound for the
/// column norm to the power `p` that grows like `n - θ ln n`.
pub fn column_bound(params: &KnParams) -> f64 {
    let theta = params.theta();
    let shift = (params.n + 1) as f64 * std::f64::consts::LN_2;
    let mut s = Compensated::default();
    for m in 2..=params.num_strips() {
        s.add((shift + params.m_pow(m)).powf(-theta));
    }
    s.value()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TkBound {
    pub exact_col_norm_p: f64,
    pub bound: f64,
}

pub fn tk_lower_bound(params: &KnParams) -> Result<TkBound> {
    let exact = KnAnalytic::new(*params).column_norm_p();
    let bound = column_bound(params);
    if exact < bound * (1.0 - 1e-12) {
        return Err(Error::CertificationFailed(format!(
            "column norm^p {exact} below the bound {bound} at n = {}",
            params.n
        )));
    }
    Ok(TkBound {
        exact_col_norm_p: exact,
        bound,
    })
}

/// Explicit rectangles of `K_n`: strip `m` of width `2^{-n}` in `t` is cut
/// into `1/b_m` pieces `B_{m,k}`, and piece `k` carries the value on
/// `A_{m,k} = [(k-1) b_m, k b_m)` in `s`.
pub fn materialize(params: &KnParams) -> Result<StepFn2d> {
    let count = params.rectangle_count();
    if count > MATERIALIZE_CAP {
        return Err(Error::SizeLimit(format!(
            "K_n with n = {}, p = {} needs {} rectangles (cap {MATERIALIZE_CAP})",
            params.n,
            params.p,
            if count == u64::MAX { "too many".to_string() } else { count.to_string() }
        )));
    }
    let strips = params.num_strips() as f64;
    let w = crate::norms::WeightFn::W { p: params.p };
    let mut rects = Vec::with_capacity(count as usize);
    for m in 1..=params.num_strips() {
        let q = params.inv_b(m).expect("within the cap");
        // value from the weight itself rather than the closed form
        let value = w.eval_ln(params.log_a(m)).powf(-1.0 / params.p);
        let qf = q as f64;
        for k in 1..=q {
            let (lo, hi) = ((k - 1) as f64 / qf, k as f64 / qf);
            rects.push(Rect {
                s: [lo, hi],
                t: [((m - 1) as f64 + lo) / strips, ((m - 1) as f64 + hi) / strips],
                value,
            });
        }
    }
    Ok(StepFn2d::from_disjoint(rects))
}
