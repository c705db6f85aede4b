use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::SpaceSpec;
use crate::stepfn::StepFn;

pub const STEPFN2D_SCHEMA_VERSION: u32 = 1;

/// `value · χ_{[s0,s1) × [t0,t1)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub s: [f64; 2],
    pub t: [f64; 2],
    pub value: f64,
}

impl Rect {
    fn validate(&self) -> Result<()> {
        let ok = |iv: [f64; 2]| 0.0 <= iv[0] && iv[0] < iv[1] && iv[1] <= 1.0;
        if !ok(self.s) || !ok(self.t) {
            return Err(Error::InvalidStepFn(format!(
                "rectangle {:?} x {:?} is not a nonempty subset of [0,1)^2",
                self.s, self.t
            )));
        }
        if !self.value.is_finite() {
            return Err(Error::InvalidStepFn("rectangle values must be finite".into()));
        }
        Ok(())
    }

    fn transposed(&self) -> Rect {
        Rect {
            s: self.t,
            t: self.s,
            value: self.value,
        }
    }
}

/// Step function on `[0,1)²` given by pairwise disjoint rectangles; the
/// part of the square they leave uncovered carries the value 0, which
/// completes them to a partition. Zero-valued rectangles are dropped on
/// construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepFn2dRecord", into = "StepFn2dRecord")]
pub struct StepFn2d {
    rects: Vec<Rect>,
}

#[derive(Serialize, Deserialize)]
struct StepFn2dRecord {
    #[serde(default = "default_version")]
    version: u32,
    rectangles: Vec<Rect>,
}

fn default_version() -> u32 {
    STEPFN2D_SCHEMA_VERSION
}

impl TryFrom<StepFn2dRecord> for StepFn2d {
    type Error = Error;
    fn try_from(rec: StepFn2dRecord) -> Result<Self> {
        if rec.version != STEPFN2D_SCHEMA_VERSION {
            return Err(Error::InvalidStepFn(format!(
                "unsupported schema version {}",
                rec.version
            )));
        }
        StepFn2d::new(rec.rectangles)
    }
}

impl From<StepFn2d> for StepFn2dRecord {
    fn from(f: StepFn2d) -> Self {
        StepFn2dRecord {
            version: STEPFN2D_SCHEMA_VERSION,
            rectangles: f.rects,
        }
    }
}

/// One horizontal strip: `F(·, t)` for `t ∈ [t0, t1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub t0: f64,
    pub t1: f64,
    pub f: StepFn,
}

impl StepFn2d {
    pub fn new(rects: Vec<Rect>) -> Result<Self> {
        for r in &rects {
            r.validate()?;
        }
        let f = StepFn2d {
            rects: rects.into_iter().filter(|r| r.value != 0.0).collect(),
        };
        // overlap detection happens while slicing
        f.sections()?;
        Ok(f)
    }

    /// Built by this crate from disjoint pieces; skips the overlap scan.
    pub(crate) fn from_disjoint(rects: Vec<Rect>) -> Self {
        StepFn2d {
            rects: rects.into_iter().filter(|r| r.value != 0.0).collect(),
        }
    }

    pub fn zero() -> Self {
        StepFn2d { rects: Vec::new() }
    }

    /// `F(s, t) = g(s)`.
    pub fn from_s_function(g: &StepFn) -> Self {
        Self::from_disjoint(
            g.cells()
                .map(|(lo, hi, v)| Rect {
                    s: [lo, hi],
                    t: [0.0, 1.0],
                    value: v,
                })
                .collect(),
        )
    }

    /// Tensor-grid function: `values[a][b]` on `[s_a, s_{a+1}) × [t_b, t_{b+1})`.
    pub fn from_grid(s_breaks: &[f64], t_breaks: &[f64], values: &[Vec<f64>]) -> Result<Self> {
        let mut rects = Vec::new();
        if values.len() + 1 != s_breaks.len() {
            return Err(Error::InvalidStepFn("grid shape mismatch in s".into()));
        }
        for (a, row) in values.iter().enumerate() {
            if row.len() + 1 != t_breaks.len() {
                return Err(Error::InvalidStepFn("grid shape mismatch in t".into()));
            }
            for (b, &v) in row.iter().enumerate() {
                rects.push(Rect {
                    s: [s_breaks[a], s_breaks[a + 1]],
                    t: [t_breaks[b], t_breaks[b + 1]],
                    value: v,
                });
            }
        }
        Self::new(rects)
    }

    pub fn rects(&self) -> &[Rect] {
        &self.rects
    }

    pub fn num_rects(&self) -> usize {
        self.rects.len()
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        self.rects
            .iter()
            .find(|r| r.s[0] <= s && s < r.s[1] && r.t[0] <= t && t < r.t[1])
            .map_or(0.0, |r| r.value)
    }

    /// `(TF)(s, t) = F(t, s)`.
    pub fn transpose(&self) -> StepFn2d {
        StepFn2d {
            rects: self.rects.iter().map(Rect::transposed).collect(),
        }
    }

    /// Cuts the square into horizontal strips on which `F(·, t)` does not
    /// depend on `t`, and returns each strip with its section.
    pub fn sections(&self) -> Result<Vec<Section>> {
        let mut bps: Vec<f64> = vec![0.0, 1.0];
        bps.extend(self.rects.iter().flat_map(|r| r.t));
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        let cells = bps.len() - 1;
        let mut pieces: Vec<Vec<(f64, f64, f64)>> = vec![Vec::new(); cells];
        for r in &self.rects {
            let start = bps.partition_point(|&b| b < r.t[0]);
            let end = bps.partition_point(|&b| b < r.t[1]);
            for cell in &mut pieces[start..end] {
                cell.push((r.s[0], r.s[1], r.value));
            }
        }
        pieces
            .into_iter()
            .enumerate()
            .map(|(j, mut ps)| {
                ps.sort_by(|x, y| x.0.total_cmp(&y.0));
                let mut sb = vec![0.0];
                let mut vals = Vec::new();
                for (s0, s1, v) in ps {
                    let last = *sb.last().unwrap();
                    if s0 < last {
                        return Err(Error::InvalidStepFn(format!(
                            "rectangles overlap near s = {s0}, t = {}",
                            bps[j]
                        )));
                    }
                    if s0 > last {
                        sb.push(s0);
                        vals.push(0.0);
                    }
                    sb.push(s1);
                    vals.push(v);
                }
                if *sb.last().unwrap() < 1.0 {
                    sb.push(1.0);
                    vals.push(0.0);
                }
                Ok(Section {
                    t0: bps[j],
                    t1: bps[j + 1],
                    f: StepFn::new(sb, vals)?,
                })
            })
            .collect()
    }

    /// `t ↦ ‖F(·, t)‖_inner` as a step function in `t`.
    pub fn inner_profile(&self, inner: &SpaceSpec) -> Result<StepFn> {
        let sections = self.sections()?;
        let mut bps = vec![0.0];
        let mut vals = Vec::with_capacity(sections.len());
        for sec in &sections {
            bps.push(sec.t1);
            vals.push(inner.norm(&sec.f)?);
        }
        StepFn::new(bps, vals)
    }
}

/// `‖F‖_{X(Y)} = ‖ t ↦ ‖F(·,t)‖_Y ‖_X` with `X = outer`, `Y = inner`.
pub fn mixed_norm(f: &StepFn2d, outer: &SpaceSpec, inner: &SpaceSpec) -> Result<f64> {
    outer.norm(&f.inner_profile(inner)?)
}

/// [`mixed_norm`] driven by a `Mixed` descriptor.
pub fn mixed_norm_spec(f: &StepFn2d, spec: &SpaceSpec) -> Result<f64> {
    match spec {
        SpaceSpec::Mixed { outer, inner } => mixed_norm(f, outer, inner),
        other => Err(Error::InvalidSpace(format!("`{other}` is not a mixed norm"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quarter_block() -> StepFn2d {
        StepFn2d::new(vec![Rect {
            s: [0.0, 0.5],
            t: [0.0, 0.5],
            value: 1.0,
        }])
        .unwrap()
    }

    #[test]
    fn transpose_examples() {
        let sym = quarter_block();
        assert_eq!(sym.transpose(), sym);
        let f = StepFn2d::new(vec![Rect {
            s: [0.0, 0.5],
            t: [0.5, 1.0],
            value: 1.0,
        }])
        .unwrap();
        let t = f.transpose();
        assert_eq!(t.eval(0.75, 0.25), 1.0);
        assert_eq!(t.eval(0.25, 0.75), 0.0);
        assert_eq!(t.transpose(), f);
    }

    #[test]
    fn mixed_norm_of_s_only_function() {
        let g = StepFn::uniform(&[2.0, -1.0, 0.5]).unwrap();
        let f = StepFn2d::from_s_function(&g);
        for inner in [SpaceSpec::xp(1.5), SpaceSpec::exp_l(2.0), SpaceSpec::lp(3.0)] {
            for outer in [SpaceSpec::lp(1.0), SpaceSpec::Linf, SpaceSpec::xp(1.5)] {
                let got = mixed_norm(&f, &outer, &inner).unwrap();
                let want = inner.norm(&g).unwrap();
                assert!((got - want).abs() < 1e-13 * want);
            }
        }
    }

    #[test]
    fn quarter_block_in_l1_of_xp() {
        let got = mixed_norm(&quarter_block(), &SpaceSpec::lp(1.0), &SpaceSpec::xp(1.5)).unwrap();
        let w_half = (1.0 + 2f64.ln()).powf(-0.5);
        assert!((got - w_half.powf(1.0 / 1.5) / 2.0).abs() < 1e-15);
        let spec: SpaceSpec = "Lp:1(Xp:1.5)".parse().unwrap();
        assert_eq!(mixed_norm_spec(&quarter_block(), &spec).unwrap(), got);
    }

    #[test]
    fn overlap_is_rejected() {
        let r = |s0, s1, t0, t1| Rect {
            s: [s0, s1],
            t: [t0, t1],
            value: 1.0,
        };
        assert!(StepFn2d::new(vec![r(0.0, 0.5, 0.0, 0.5), r(0.4, 0.6, 0.3, 0.7)]).is_err());
        assert!(StepFn2d::new(vec![r(0.0, 0.5, 0.0, 0.5), r(0.5, 0.6, 0.3, 0.7)]).is_ok());
        assert!(StepFn2d::new(vec![r(0.0, 1.5, 0.0, 0.5)]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = quarter_block();
        let j = serde_json::to_string(&f).unwrap();
        assert!(j.starts_with(r#"{"version":1,"rectangles":"#));
        let g: StepFn2d = serde_json::from_str(&j).unwrap();
        assert_eq!(f, g);
    }
}
