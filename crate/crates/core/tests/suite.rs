//! Suite runner behaviour: determinism, report round trips, worker caps.

use meanforge::inequalities::{evaluate, find_case, registry, run_suite, InstanceTriple, SuiteConfig, VerificationReport};
use meanforge::StreamSeed;

fn config(seed: u64) -> SuiteConfig {
    SuiteConfig {
        dims: vec![1, 2, 4],
        samples: 10,
        seed,
        ..SuiteConfig::default()
    }
}

#[test]
fn same_seed_gives_identical_reports() {
    let a = run_suite(&config(11)).unwrap().without_timing().to_json();
    let b = run_suite(&config(11)).unwrap().without_timing().to_json();
    assert_eq!(a, b);
    let c = run_suite(&config(12)).unwrap().without_timing().to_json();
    assert_ne!(a, c);
}

#[test]
fn report_survives_json() {
    let report = run_suite(&config(3)).unwrap();
    let text = report.to_json();
    let back = VerificationReport::from_json(&text).unwrap();
    assert_eq!(back, report);
    assert_eq!(back.to_json(), text);
    assert_eq!(report.cases.len(), registry().len());
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["seed", "dims", "samples", "tolerance", "cases", "elapsedSeconds"] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
    for key in ["id", "minMargin", "violations", "worstSeed", "steps"] {
        assert!(value["cases"][0].get(key).is_some(), "missing {key}");
    }
}

#[test]
fn worst_instance_can_be_regenerated() {
    let report = run_suite(&config(5)).unwrap();
    for id in ["eq1.2", "eq2.8", "prop2.1-2"] {
        let record = report.case(id).unwrap();
        let inst = InstanceTriple::random(record.worst_dim, StreamSeed(record.worst_seed), report.cond_range);
        let steps = evaluate(find_case(id).unwrap(), &record.worst_params, &inst, false).unwrap();
        let min = steps.iter().map(|s| s.min_normalized().0).fold(f64::INFINITY, f64::min);
        assert_eq!(min, record.min_margin, "{id}");
    }
}

#[test]
fn thread_cap_does_not_change_results() {
    let free = run_suite(&config(8)).unwrap().without_timing();
    std::env::set_var("MEANFORGE_THREADS", "1");
    let capped = run_suite(&config(8)).unwrap().without_timing();
    std::env::remove_var("MEANFORGE_THREADS");
    assert_eq!(free, capped);
}

#[test]
fn chain_cases_report_every_step() {
    let report = run_suite(&config(1)).unwrap();
    for (id, steps) in [("eq1.3", 2), ("eq2.2", 2), ("eq2.3", 2), ("eq2.8", 3), ("eq2.9", 4)] {
        assert_eq!(report.case(id).unwrap().steps.len(), steps, "{id}");
    }
    assert_eq!(report.total_violations, 0);
}
