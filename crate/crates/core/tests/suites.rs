use rispace::harness::{indicator_family, run_suite, ExperimentReport, SuiteParams, REPORT_SCHEMA, SUITE_IDS};

fn small(id: &str) -> SuiteParams {
    let p = SuiteParams::for_suite(id).unwrap();
    SuiteParams {
        trials: p.trials.min(6),
        n_max: p.n_max.min(6),
        ..p
    }
}

#[test]
fn every_suite_runs_and_passes() {
    for id in SUITE_IDS {
        let r = run_suite(id, 17, &small(id)).unwrap();
        assert_eq!(r.schema, REPORT_SCHEMA);
        assert_eq!(r.experiment, id);
        assert!(r.all_ok, "{id}: {:?}", r.trials.iter().find(|t| !t.ok));
        assert_eq!(r.aggregate.count, r.trials.len());
    }
}

#[test]
fn reports_round_trip_through_json() {
    let r = run_suite("rademacher-domination", 5, &small("rademacher-domination")).unwrap();
    let text = r.to_json().unwrap();
    let back: ExperimentReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
    assert_eq!(run_suite("rademacher-domination", 5, &small("rademacher-domination")).unwrap().to_json().unwrap(), text);
}

#[test]
fn xp_into_lp_summing_stays_bounded() {
    let maxima: Vec<f64> = [1, 2, 3]
        .iter()
        .map(|&s| run_suite("xp-summing", s, &small("xp-summing")).unwrap().aggregate.max_ratio.unwrap())
        .collect();
    assert!(maxima.iter().all(|&m| m < 2.0), "{maxima:?}");
}

#[test]
fn indicator_family_grows_without_bound() {
    let ratios: Vec<f64> = [2, 8, 32, 128]
        .iter()
        .map(|&k| indicator_family(k, 1.5, 2.0).unwrap().ratio.ratio)
        .collect();
    assert!(ratios.windows(2).all(|w| w[1] > w[0] * 1.25), "{ratios:?}");
}

#[test]
fn counterexample_suite_records_the_bound() {
    let params = SuiteParams {
        trials: 4,
        n_min: 3,
        ..SuiteParams::for_suite("counterexample").unwrap()
    };
    let r = run_suite("counterexample", 0, &params).unwrap();
    for (k, t) in r.trials.iter().enumerate() {
        assert_eq!(t.extra["n"], (3 + k) as f64);
        assert!(t.extra["col_norm_p"] >= t.extra["bound"]);
    }
}
