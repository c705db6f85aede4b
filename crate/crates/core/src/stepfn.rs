//! Piecewise-constant functions on `[0, 1)` and finite sequences.
//!
//! Cells are half-open `[t_{i-1}, t_i)`. Every constructor returns the
//! canonical form: adjacent cells with equal values are merged, so two
//! functions are equal as values iff they are structurally equal.
//!
//! Measures of level sets are computed with correctly rounded summation
//! of exact interval lengths. As a consequence the distribution function
//! of `f` and of its decreasing rearrangement agree bit for bit.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{Compensated, ExactSum};

/// Schema version written into serialized step functions.
pub const STEPFN_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepFnRecord", into = "StepFnRecord")]
pub struct StepFn {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct StepFnRecord {
    #[serde(default = "default_version")]
    version: u32,
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

fn default_version() -> u32 {
    STEPFN_SCHEMA_VERSION
}

impl TryFrom<StepFnRecord> for StepFn {
    type Error = Error;

    fn try_from(rec: StepFnRecord) -> Result<Self> {
        if rec.version != STEPFN_SCHEMA_VERSION {
            return Err(Error::InvalidStepFn(format!(
                "unsupported schema version {}",
                rec.version
            )));
        }
        StepFn::new(rec.breakpoints, rec.values)
    }
}

impl From<StepFn> for StepFnRecord {
    fn from(f: StepFn) -> Self {
        StepFnRecord {
            version: STEPFN_SCHEMA_VERSION,
            breakpoints: f.breakpoints,
            values: f.values,
        }
    }
}

impl StepFn {
    /// Builds a step function from `n + 1` breakpoints `0 = t_0 < ... < t_n = 1`
    /// and `n` finite values.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidStepFn("at least one cell is required".into()));
        }
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::InvalidStepFn(format!(
                "{} breakpoints for {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::InvalidStepFn(
                "breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidStepFn(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidStepFn("values must be finite".into()));
        }
        Ok(Self::canonical(breakpoints, values))
    }

    /// Merges equal neighbours. Inputs are assumed valid.
    fn canonical(breakpoints: Vec<f64>, values: Vec<f64>) -> Self {
        let mut bps = Vec::with_capacity(breakpoints.len());
        let mut vals: Vec<f64> = Vec::with_capacity(values.len());
        bps.push(breakpoints[0]);
        for (i, &v) in values.iter().enumerate() {
            // normalizes -0.0
            let v = if v == 0.0 { 0.0 } else { v };
            match vals.last() {
                Some(&last) if last == v => {
                    *bps.last_mut().unwrap() = breakpoints[i + 1];
                }
                _ => {
                    vals.push(v);
                    bps.push(breakpoints[i + 1]);
                }
            }
        }
        StepFn {
            breakpoints: bps,
            values: vals,
        }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        assert!(c.is_finite(), "constant must be finite");
        StepFn {
            breakpoints: vec![0.0, 1.0],
            values: vec![if c == 0.0 { 0.0 } else { c }],
        }
    }

    /// Characteristic function of `[a, b)`.
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        if !(0.0 <= a && a < b && b <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "indicator interval [{a}, {b}) must satisfy 0 <= a < b <= 1"
            )));
        }
        let mut bps = vec![0.0];
        let mut vals = Vec::new();
        if a > 0.0 {
            bps.push(a);
            vals.push(0.0);
        }
        bps.push(b);
        vals.push(1.0);
        if b < 1.0 {
            bps.push(1.0);
            vals.push(0.0);
        }
        Ok(Self::canonical(bps, vals))
    }

    /// Values on `n` equal cells `[(j-1)/n, j/n)`.
    pub fn uniform(values: &[f64]) -> Result<Self> {
        let n = values.len();
        let bps = (0..=n).map(|j| j as f64 / n as f64).collect();
        Self::new(bps, values.to_vec())
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn num_cells(&self) -> usize {
        self.values.len()
    }

    /// Iterator over `(lo, hi, value)`.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, &v)| (w[0], w[1], v))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Value at `t` (right-continuous, `t` clamped into `[0, 1)`).
    pub fn eval(&self, t: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|&b| b <= t);
        let cell = idx.saturating_sub(1).min(self.values.len() - 1);
        self.values[cell]
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        let vals = self.values.iter().map(|&v| f(v)).collect();
        Self::canonical(self.breakpoints.clone(), vals)
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// Pointwise combination on the common refinement.
    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &StepFn, op: F) -> Self {
        let r = Refinement::new(&[self.clone(), other.clone()]);
        let vals = r.columns[0]
            .iter()
            .zip(&r.columns[1])
            .map(|(&a, &b)| op(a, b))
            .collect();
        Self::canonical(r.breakpoints, vals)
    }

    /// `Σ c_k f_k` evaluated on the common refinement.
    pub fn linear_combination(funcs: &[StepFn], coeffs: &[f64]) -> Result<Self> {
        if funcs.len() != coeffs.len() {
            return Err(Error::InvalidArgument(format!(
                "{} functions but {} coefficients",
                funcs.len(),
                coeffs.len()
            )));
        }
        if funcs.is_empty() {
            return Ok(Self::zero());
        }
        Ok(Refinement::new(funcs).combine(coeffs))
    }

    pub fn l1_norm(&self) -> f64 {
        let mut acc = Compensated::default();
        for (lo, hi, v) in self.cells() {
            acc.add(v.abs() * (hi - lo));
        }
        acc.value()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Smallest cell measure.
    pub fn min_cell_measure(&self) -> f64 {
        self.cells()
            .map(|(lo, hi, _)| hi - lo)
            .fold(f64::INFINITY, f64::min)
    }

    /// `m{t : |f(t)| > λ}`.
    pub fn distribution(&self, lambda: f64) -> Result<f64> {
        if !(lambda >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "distribution level must be nonnegative, got {lambda}"
            )));
        }
        let mut acc = ExactSum::new();
        for (lo, hi, v) in self.cells() {
            if v.abs() > lambda {
                acc.add_span(lo, hi);
            }
        }
        Ok(acc.value())
    }

    /// Decreasing rearrangement `f*`: `|f|` with its cells sorted by value,
    /// largest first, measures preserved.
    pub fn rearrange(&self) -> StepFn {
        let mut order: Vec<usize> = (0..self.values.len()).collect();
        order.sort_by(|&a, &b| {
            self.values[b]
                .abs()
                .partial_cmp(&self.values[a].abs())
                .unwrap_or(Ordering::Equal)
        });
        let mut bps = vec![0.0];
        let mut vals = Vec::new();
        let mut acc = ExactSum::new();
        let mut j = 0;
        while j < order.len() {
            let level = self.values[order[j]].abs();
            while j < order.len() && self.values[order[j]].abs() == level {
                let c = order[j];
                acc.add_span(self.breakpoints[c], self.breakpoints[c + 1]);
                j += 1;
            }
            let end = if j == order.len() { 1.0 } else { acc.value() };
            // a level set below float resolution at this offset has no cell
            if end > *bps.last().unwrap() {
                bps.push(end);
                vals.push(level);
            }
        }
        Self::canonical(bps, vals)
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] >= w[1])
    }

    /// `∫_0^τ f*(t) dt` for `τ ∈ (0, 1]`.
    pub fn head_integral(&self, tau: f64) -> Result<f64> {
        check_tau(tau)?;
        Ok(self.rearrange().head_integral_sorted(tau))
    }

    /// Head integrals at several levels with a single rearrangement.
    pub fn head_integrals(&self, taus: &[f64]) -> Result<Vec<f64>> {
        for &t in taus {
            check_tau(t)?;
        }
        let r = self.rearrange();
        Ok(taus.iter().map(|&t| r.head_integral_sorted(t)).collect())
    }

    /// Head integral assuming `self` is already a decreasing rearrangement.
    pub(crate) fn head_integral_sorted(&self, tau: f64) -> f64 {
        let mut acc = Compensated::default();
        for (lo, hi, v) in self.cells() {
            if lo >= tau {
                break;
            }
            acc.add(v * (hi.min(tau) - lo));
        }
        acc.value()
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "head integral level must lie in (0, 1], got {tau}"
        )))
    }
}

impl Neg for &StepFn {
    type Output = StepFn;
    fn neg(self) -> StepFn {
        self.scale(-1.0)
    }
}

impl Add for &StepFn {
    type Output = StepFn;
    fn add(self, rhs: &StepFn) -> StepFn {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &StepFn {
    type Output = StepFn;
    fn sub(self, rhs: &StepFn) -> StepFn {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &StepFn {
    type Output = StepFn;
    fn mul(self, rhs: f64) -> StepFn {
        self.scale(rhs)
    }
}

/// A family of step functions sampled on their common refinement.
#[derive(Clone, Debug)]
pub struct Refinement {
    pub breakpoints: Vec<f64>,
    /// `columns[k][j]` is the value of function `k` on refined cell `j`.
    pub columns: Vec<Vec<f64>>,
}

impl Refinement {
    pub fn new(funcs: &[StepFn]) -> Self {
        let mut bps: Vec<f64> = funcs
            .iter()
            .flat_map(|f| f.breakpoints.iter().copied())
            .collect();
        if bps.is_empty() {
            bps = vec![0.0, 1.0];
        }
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        let cells = bps.len() - 1;
        let columns = funcs
            .iter()
            .map(|f| {
                let mut col = Vec::with_capacity(cells);
                let mut c = 0;
                for &x in &bps[..cells] {
                    while f.breakpoints[c + 1] <= x {
                        c += 1;
                    }
                    col.push(f.values[c]);
                }
                col
            })
            .collect();
        Refinement {
            breakpoints: bps,
            columns,
        }
    }

    pub fn num_cells(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn measures(&self) -> Vec<f64> {
        self.breakpoints.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Cellwise values of `Σ c_k f_k`.
    pub fn combine_values(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_cells()];
        for (col, &c) in self.columns.iter().zip(coeffs) {
            if c == 0.0 {
                continue;
            }
            for (o, &v) in out.iter_mut().zip(col) {
                *o += c * v;
            }
        }
        out
    }

    pub fn combine(&self, coeffs: &[f64]) -> StepFn {
        self.to_step(self.combine_values(coeffs))
    }

    /// Step function with the given per-cell values on this refinement.
    pub fn to_step(&self, values: Vec<f64>) -> StepFn {
        assert_eq!(values.len(), self.num_cells());
        StepFn::canonical(self.breakpoints.clone(), values)
    }
}

/// A finite sequence of reals (coefficients or norms).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SeqVec(Vec<f64>);

impl TryFrom<Vec<f64>> for SeqVec {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        SeqVec::new(v)
    }
}

impl From<SeqVec> for Vec<f64> {
    fn from(s: SeqVec) -> Self {
        s.0
    }
}

impl SeqVec {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("sequence entries must be finite".into()));
        }
        Ok(SeqVec(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Absolute values sorted nonincreasingly.
    pub fn rearrange(&self) -> SeqVec {
        let mut v: Vec<f64> = self.0.iter().map(|x| x.abs()).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        SeqVec(v)
    }

    pub fn l2_norm(&self) -> f64 {
        let scale = self.0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let s: f64 = self.0.iter().map(|v| (v / scale).powi(2)).sum();
        scale * s.sqrt()
    }
}

/// Free-function form of [`SeqVec::rearrange`].
pub fn seq_rearrange(a: &SeqVec) -> SeqVec {
    a.rearrange()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn thirds(a: f64, b: f64, c: f64) -> StepFn {
        StepFn::uniform(&[a, b, c]).unwrap()
    }

    #[test]
    fn constant_is_its_own_rearrangement() {
        let f = StepFn::constant(2.0);
        assert_eq!(f.rearrange(), f);
    }

    #[test]
    fn rearranges_thirds() {
        let r = thirds(1.0, 3.0, 2.0).rearrange();
        assert_eq!(r.values(), &[3.0, 2.0, 1.0]);
        for lambda in [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0] {
            let f = thirds(1.0, 3.0, 2.0);
            assert_eq!(
                r.distribution(lambda).unwrap(),
                f.distribution(lambda).unwrap()
            );
        }
    }

    #[test]
    fn middle_indicator_moves_left() {
        let f = StepFn::indicator(0.25, 0.75).unwrap();
        assert_eq!(f.rearrange(), StepFn::indicator(0.0, 0.5).unwrap());
    }

    #[test]
    fn distribution_examples() {
        let half = StepFn::indicator(0.0, 0.5).unwrap();
        assert_eq!(half.distribution(0.5).unwrap(), 0.5);
        assert_eq!(half.distribution(1.0).unwrap(), 0.0);
        let d = thirds(1.0, 3.0, 2.0).distribution(1.5).unwrap();
        assert!((d - 2.0 / 3.0).abs() < 1e-15);
        assert!(half.distribution(-0.1).is_err());
    }

    #[test]
    fn head_integral_examples() {
        let f = thirds(3.0, 2.0, 1.0);
        assert!((f.head_integral(0.5).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!((f.head_integral(1.0).unwrap() - f.l1_norm()).abs() < 1e-15);
        let ind = StepFn::indicator(0.0, 0.4).unwrap();
        assert!((ind.head_integral(0.3).unwrap() - 0.3).abs() < 1e-16);
        assert!(f.head_integral(0.0).is_err());
        assert!(f.head_integral(1.5).is_err());
    }

    #[test]
    fn seq_rearrange_examples() {
        let s = |v: &[f64]| SeqVec::new(v.to_vec()).unwrap();
        assert_eq!(seq_rearrange(&s(&[1.0, 3.0, 2.0])), s(&[3.0, 2.0, 1.0]));
        assert_eq!(seq_rearrange(&s(&[0.0, 0.0])), s(&[0.0, 0.0]));
        assert_eq!(seq_rearrange(&s(&[-2.0, 1.0])), s(&[2.0, 1.0]));
    }

    #[test]
    fn canonical_form_merges_and_zero_has_one_cell() {
        let f = StepFn::new(vec![0.0, 0.5, 1.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(f.num_cells(), 1);
        let z = &StepFn::indicator(0.0, 0.5).unwrap() - &StepFn::indicator(0.0, 0.5).unwrap();
        assert_eq!(z, StepFn::zero());
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(StepFn::new(vec![0.0, 1.0], vec![]).is_err());
        assert!(StepFn::new(vec![0.0, 0.6, 0.5, 1.0], vec![1.0, 2.0, 3.0]).is_err());
        assert!(StepFn::new(vec![0.1, 1.0], vec![1.0]).is_err());
        assert!(StepFn::new(vec![0.0, 1.0], vec![f64::NAN]).is_err());
    }

    #[test]
    fn json_round_trip_and_version_check() {
        let f = thirds(1.0, -2.0, 0.5);
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"version\":1"));
        let g: StepFn = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
        let bad = r#"{"version":9,"breakpoints":[0,1],"values":[1]}"#;
        assert!(serde_json::from_str::<StepFn>(bad).is_err());
    }
}
