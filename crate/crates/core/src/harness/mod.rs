//! Seeded experiments: random step-function families, maxima over sign
//! patterns, summing ratios, the inequality checks and the suite runner
//! producing versioned reports.

mod checks;
mod random;
mod suite;
mod summing;

pub use checks::{
    weak_summing_check, rademacher_domination_check, weak_concavity_check, ConcavityCheck, WeakSummingCheck, RademacherDomination,
    MAX_CHECK_FAMILY,
};
pub use random::{
    random_family, random_positive_seq, random_stepfn, random_stepfn2d, trial_rng,
    DEFAULT_MAX_CELLS,
};
pub use suite::{
    run_suite, Aggregate, ExperimentReport, SuiteParams, TrialRecord, REPORT_SCHEMA, SUITE_IDS,
};
pub use summing::{
    indicator_family, max_sign_norm, max_sign_norm_with, summing_ratio, IndicatorFamily,
    MaxSignConfig, SignMax, SummingRatio, MAX_EXHAUSTIVE_SIGNS,
};
