use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::checks::{weak_summing_check, rademacher_domination_check, weak_concavity_check, MAX_CHECK_FAMILY};
use super::random::{random_family, random_positive_seq, random_stepfn2d, trial_rng};
use super::summing::{indicator_family, summing_ratio};
use crate::error::{Error, Result};
use crate::mixed2d::{mixed_norm, tk_lower_bound, KnAnalytic, KnParams};
use crate::norms::{SpaceSpec, WeightFn};
use crate::numeric::Compensated;
use crate::rademacher::head_estimate;
use crate::signselect::{select_signs, PipelineConfig, GAMMA_PRIME};

pub const REPORT_SCHEMA: &str = "rispace/report/v1";

pub const SUITE_IDS: [&str; 9] = [
    "rademacher-head",
    "sign-selection",
    "rademacher-domination",
    "weak-summing",
    "concavity",
    "xp-summing",
    "indicators",
    "transpose-exp",
    "counterexample",
];

/// Knobs shared by all suites; each suite reads the ones it needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteParams {
    pub trials: usize,
    /// Family sizes are drawn uniformly from `n_min..=n_max`.
    pub n_min: usize,
    pub n_max: usize,
    pub max_cells: usize,
    pub nonneg: bool,
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub weight: WeightFn,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            trials: 20,
            n_min: 1,
            n_max: 8,
            max_cells: 32,
            nonneg: false,
            p: 1.5,
            q: 1.8,
            alpha: 2.0,
            weight: WeightFn::PhiP { p: 1.5 },
        }
    }
}

impl SuiteParams {
    /// Defaults adjusted to what suite `id` can run.
    pub fn for_suite(id: &str) -> Result<Self> {
        let d = SuiteParams::default();
        Ok(match id {
            "rademacher-head" => SuiteParams { n_max: 14, ..d },
            "sign-selection" => SuiteParams { n_max: 12, ..d },
            "rademacher-domination" | "weak-summing" | "concavity" | "xp-summing" => d,
            "indicators" => SuiteParams { trials: 6, q: 2.0, ..d },
            "transpose-exp" => SuiteParams { max_cells: 8, p: 2.0, ..d },
            "counterexample" => SuiteParams { trials: 14, ..d },
            other => return Err(Error::UnknownExperiment(other.to_string())),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    /// SHA-256 of the trial inputs as JSON.
    pub digest: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub ok: bool,
    /// False when a max over signs is only a heuristic lower bound.
    pub exact: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub count: usize,
    pub min_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
    pub mean_ratio: Option<f64>,
}

impl Aggregate {
    pub fn of(records: &[TrialRecord]) -> Self {
        let ratios: Vec<f64> = records.iter().map(|r| r.ratio).filter(|r| r.is_finite()).collect();
        if ratios.is_empty() {
            return Aggregate {
                count: records.len(),
                ..Aggregate::default()
            };
        }
        let mut sum = Compensated::default();
        for &r in &ratios {
            sum.add(r);
        }
        Aggregate {
            count: records.len(),
            min_ratio: ratios.iter().copied().reduce(f64::min),
            max_ratio: ratios.iter().copied().reduce(f64::max),
            mean_ratio: Some(sum.value() / ratios.len() as f64),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub experiment: String,
    pub seed: u64,
    pub params: SuiteParams,
    pub trials: Vec<TrialRecord>,
    pub aggregate: Aggregate,
    pub all_ok: bool,
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per trial; `extra` columns are omitted.
    pub fn to_csv(&self, precision: usize) -> String {
        let mut out = String::from("trial,digest,lhs,rhs,ratio,ok,exact\n");
        for r in &self.trials {
            out.push_str(&format!(
                "{},{},{:.*e},{:.*e},{:.*e},{},{}\n",
                r.trial, r.digest, precision, r.lhs, precision, r.rhs, precision, r.ratio, r.ok, r.exact
            ));
        }
        out
    }
}

fn digest<T: Serialize>(inputs: &T) -> Result<String> {
    let bytes = serde_json::to_vec(inputs)?;
    Ok(format!("{:x}", Sha256::digest(bytes)))
}

fn record(trial: u64, digest: String, lhs: f64, rhs: f64, ok: bool) -> TrialRecord {
    TrialRecord {
        trial,
        digest,
        lhs,
        rhs,
        ratio: lhs / rhs,
        ok,
        exact: true,
        extra: BTreeMap::new(),
    }
}

fn family_size<R: Rng>(rng: &mut R, params: &SuiteParams, cap: usize) -> Result<usize> {
    let lo = params.n_min.max(1);
    let hi = params.n_max.min(cap);
    if lo > hi {
        return Err(Error::InvalidArgument(format!(
            "family size range {}..={} is empty (cap {cap})",
            params.n_min, params.n_max
        )));
    }
    Ok(rng.gen_range(lo..=hi))
}

fn run_trial(id: &str, seed: u64, trial: u64, params: &SuiteParams) -> Result<TrialRecord> {
    let rng = &mut trial_rng(seed, trial);
    match id {
        "rademacher-head" => {
            let n = family_size(rng, params, crate::rademacher::MAX_TERMS)?;
            let a = random_positive_seq(rng, n);
            let i = rng.gen_range(1..=n);
            let s = head_estimate(&a, i)?;
            let mut r = record(trial, digest(&(&a, i))?, s.lhs, s.rhs, s.ratio.is_finite() && s.ratio > 0.0);
            r.extra.insert("i".into(), i as f64);
            Ok(r)
        }
        "sign-selection" => {
            let n = family_size(rng, params, 20)?;
            let f = random_family(rng, n, params.max_cells, params.nonneg);
            let i = rng.gen_range(1..=n);
            let (_, cert) = select_signs(&f, i, &PipelineConfig::default())?;
            let mut r = record(
                trial,
                digest(&(&f, i))?,
                cert.lhs,
                cert.rhs_formula,
                cert.gamma_emp >= GAMMA_PRIME - 1e-12,
            );
            r.extra.insert("i".into(), i as f64);
            Ok(r)
        }
        "rademacher-domination" => {
            let n = family_size(rng, params, MAX_CHECK_FAMILY)?;
            let f = random_family(rng, n, params.max_cells, params.nonneg);
            let c = rademacher_domination_check(&f, &params.weight)?;
            let mut r = record(trial, digest(&f)?, c.lhs, c.rhs, c.chain_ok);
            r.extra.insert("gamma".into(), c.gamma);
            r.extra.insert("level".into(), c.level as f64);
            r.extra.insert("chain_bound".into(), c.chain_bound);
            Ok(r)
        }
        "weak-summing" => {
            let n = family_size(rng, params, MAX_CHECK_FAMILY)?;
            let f = random_family(rng, n, params.max_cells, params.nonneg);
            let c = weak_summing_check(&f, params.p)?;
            Ok(record(trial, digest(&f)?, c.lhs, c.rhs, c.ratio.is_finite()))
        }
        "concavity" => {
            let n = family_size(rng, params, usize::MAX)?;
            let f = random_family(rng, n, params.max_cells, params.nonneg);
            let c = weak_concavity_check(&f, params.p, params.q)?;
            Ok(record(trial, digest(&f)?, c.lhs, c.rhs, c.ratio.is_finite()))
        }
        "xp-summing" => {
            let n = family_size(rng, params, MAX_CHECK_FAMILY)?;
            let f = random_family(rng, n, params.max_cells, params.nonneg);
            let s = summing_ratio(
                &f,
                &SpaceSpec::SeqLq { q: params.q },
                &SpaceSpec::lp(params.p),
                &SpaceSpec::xp(params.p),
            )?;
            let mut r = record(trial, digest(&f)?, s.numerator, s.denominator, s.ratio.is_finite());
            r.exact = s.exact;
            Ok(r)
        }
        "indicators" => {
            let k = 1usize << (1 + trial % 6);
            let e = indicator_family(k, params.p, params.q)?;
            let mut r = record(
                trial,
                digest(&(k, params.p, params.q))?,
                e.ratio.numerator,
                e.ratio.denominator,
                (e.ratio.ratio - e.expected).abs() <= 1e-9,
            );
            r.extra.insert("k".into(), k as f64);
            r.extra.insert("expected".into(), e.expected);
            Ok(r)
        }
        "transpose-exp" => {
            let f = random_stepfn2d(rng, params.max_cells, params.nonneg);
            let inner = SpaceSpec::exp_l(params.alpha);
            let lhs = mixed_norm(&f.transpose(), &SpaceSpec::lp(params.p), &inner)?;
            let rhs = mixed_norm(&f, &SpaceSpec::Linf, &inner)?;
            Ok(record(trial, digest(&f)?, lhs, rhs, lhs.is_finite() && rhs > 0.0))
        }
        "counterexample" => {
            let n = params.n_min.max(1) as u64 + trial;
            let kp = KnParams::new(n as u32, params.p)?;
            let an = KnAnalytic::new(kp);
            let (sup, _) = an.sup_row_norm();
            let b = tk_lower_bound(&kp)?;
            let col = b.exact_col_norm_p.powf(1.0 / params.p);
            let mut r = record(trial, digest(&kp)?, col, sup, sup <= 1.0 + 1e-12);
            r.extra.insert("n".into(), n as f64);
            r.extra.insert("col_norm_p".into(), b.exact_col_norm_p);
            r.extra.insert("bound".into(), b.bound);
            Ok(r)
        }
        other => Err(Error::UnknownExperiment(other.to_string())),
    }
}

/// Runs `params.trials` independent trials of suite `id`. Trial `j` draws
/// from its own stream of the seed, so the report is byte-identical for
/// identical `(id, seed, params)` regardless of thread scheduling.
pub fn run_suite(id: &str, seed: u64, params: &SuiteParams) -> Result<ExperimentReport> {
    if !SUITE_IDS.contains(&id) {
        return Err(Error::UnknownExperiment(id.to_string()));
    }
    let trials = (0..params.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(id, seed, t, params))
        .collect::<Result<Vec<_>>>()?;
    let aggregate = Aggregate::of(&trials);
    let all_ok = trials.iter().all(|r| r.ok);
    Ok(ExperimentReport {
        schema: REPORT_SCHEMA.to_string(),
        experiment: id.to_string(),
        seed,
        params: params.clone(),
        trials,
        aggregate,
        all_ok,
    })
}
