//! Exit codes and files of the `meanforge` binary.

use std::path::Path;
use std::process::{Command, Output};

use meanforge::cli::{load_instance, InstanceFile};
use meanforge::inequalities::VerificationReport;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meanforge")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn max_ratio(out: &Output) -> f64 {
    let text = stdout(out);
    let line = text.lines().find(|l| l.starts_with("maxRatio")).expect("ratio line");
    line.split_whitespace().nth(1).unwrap().parse().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_writes_a_clean_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    assert_eq!(code(&["verify", "--dims", "1,2,4", "--samples", "50", "--seed", "42", "--out", path_str(&out)]), 0);
    let report = VerificationReport::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.dims, vec![1, 2, 4]);
    assert_eq!(report.samples, 50);
    assert_eq!(report.total_violations, 0);
}

#[test]
fn verify_is_byte_identical_without_timing() {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.json"), dir.path().join("b.json")];
    for p in &paths {
        let args = ["verify", "--dims", "2,3", "--samples", "5", "--seed", "9", "--omit-timing", "--out", path_str(p)];
        assert_eq!(code(&args), 0);
    }
    assert_eq!(std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());
}

#[test]
fn verify_rejects_bad_flags() {
    assert_eq!(code(&["verify", "--cases", "nosuchcase"]), 2);
    assert_eq!(code(&["verify", "--samples", "0"]), 2);
    assert_eq!(code(&["verify", "--dims", "1,x"]), 2);
    assert_eq!(code(&["verify", "--tol", "abc"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn verify_selects_cases_and_fractions() {
    let out = run(&["verify", "--cases", "eq2.7,avg-716", "--dims", "2", "--samples", "3", "--cond-lo", "1/100"]);
    assert_eq!(out.status.code(), Some(0));
    let report = VerificationReport::from_json(&stdout(&out)).unwrap();
    let ids: Vec<&str> = report.cases.iter().map(|c| c.id.as_str()).collect();
    assert_eq!(ids, ["eq2.7", "avg-716"]);
    assert_eq!(report.cond_range.0, 0.01);
}

#[test]
fn fuzz_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let witness = dir.path().join("w.json");
    let args = [
        "fuzz", "--case", "eq1.2", "--set", "nu=0.1", "--set", "alpha=1/2", "--dim", "1", "--budget", "1000",
        "--expect-violation", "--out", path_str(&witness),
    ];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains(path_str(&witness)));
    let inst = load_instance(&witness).unwrap();
    assert_eq!(inst.dim(), 1);

    assert_eq!(code(&["fuzz", "--case", "eq1.3", "--dim", "2", "--budget", "1000"]), 1);
    assert_eq!(code(&["fuzz", "--case", "eq1.3", "--dim", "2", "--budget", "300", "--expect-violation"]), 1);
    assert_eq!(code(&["fuzz", "--case", "nosuchcase"]), 2);
    assert_eq!(code(&["fuzz", "--case", "eq1.2", "--set", "zeta=1"]), 2);
    assert_eq!(code(&["fuzz", "--case", "eq1.2", "--budget", "0"]), 2);
}

#[test]
fn contractivity_modes() {
    let part1 = [
        "contractivity", "--kernel", "part1", "--set", "r=1/4", "--set", "s1=1/2", "--set", "s2=1/4", "--set", "t=1",
        "--dim", "4", "--samples", "100",
    ];
    let out = run(&part1);
    assert_eq!(out.status.code(), Some(0));
    assert!(max_ratio(&out) <= 1.0 + 1e-9);

    let out = run(&["contractivity", "--kernel", "identity", "--dim", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((max_ratio(&out) - 1.0).abs() <= 1e-10);

    let degenerate = [
        "contractivity", "--kernel", "part1", "--set", "r=1", "--set", "s1=1", "--set", "s2=0", "--set", "t=0",
    ];
    let out = run(&degenerate);
    assert!((max_ratio(&out) - 1.0).abs() <= 1e-10);

    let expanding = ["contractivity", "--kernel", "part1", "--set", "r=3", "--set", "s1=1", "--set", "s2=0", "--set", "t=0"];
    assert_eq!(code(&expanding), 1);
    let mut report_only = expanding.to_vec();
    report_only.push("--report-only");
    let out = run(&report_only);
    assert_eq!(out.status.code(), Some(0));
    assert!(max_ratio(&out) > 1.0);

    for kernel in ["part2", "part3", "part4", "heinz-average"] {
        assert_eq!(code(&["contractivity", "--kernel", kernel, "--dim", "3", "--samples", "30"]), 0, "{kernel}");
    }
    // sinh(d)/d >= 1, so these expand
    for kernel in ["sinch", "log-mean"] {
        assert_eq!(code(&["contractivity", "--kernel", kernel, "--dim", "3"]), 1, "{kernel}");
        assert_eq!(code(&["contractivity", "--kernel", kernel, "--dim", "3", "--report-only"]), 0, "{kernel}");
    }
    assert_eq!(code(&["contractivity", "--kernel", "heinz-average", "--lo", "1", "--hi", "0"]), 2);
    assert_eq!(code(&["contractivity", "--kernel", "nonsense"]), 2);
}

#[test]
fn gen_is_deterministic_and_loadable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        assert_eq!(code(&["gen", "--dim", "4", "--seed", "17", "--cond-lo", "1/10", "--cond-hi", "10", "--out", path_str(p)]), 0);
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());

    let file = InstanceFile::from_json(&text).unwrap();
    let inst = load_instance(&a).unwrap();
    assert_eq!(InstanceFile::from_instance(&inst), file);
    for lambda in inst.a.eigenvalues().iter().chain(inst.b.eigenvalues()) {
        assert!((0.1 * (1.0 - 1e-12)..=10.0 * (1.0 + 1e-12)).contains(lambda));
    }

    assert_eq!(code(&["gen", "--dim", "0"]), 2);
    assert_eq!(code(&["gen", "--cond-lo", "5", "--cond-hi", "1"]), 2);
}
