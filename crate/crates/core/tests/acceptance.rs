//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the terminal.

use std::process::{Command, ExitCode};
use std::time::Instant;

use meanforge::dmap::{apply_kernel, contractivity_check, ContractiveFamily, KernelSpec};
use meanforge::inequalities::{alpha_grids, evaluate, find_case, fuzz, run_suite, FuzzConfig, InstanceTriple, SuiteConfig};
use meanforge::linalg::{hermitian_eig, random_complex, random_hpd};
use meanforge::means::{self, MeanParams};
use meanforge::norms::ky_fan_profile;
use meanforge::{c64, ComplexMatrix, HpdMatrix, StreamSeed};

const SUITE_SEED: u64 = 20_240_601;
const SUITE_DIMS: [usize; 6] = [1, 2, 3, 4, 5, 6];
const SUITE_SAMPLES: usize = 200;
const SUITE_TOL: f64 = 1e-9;
const SUITE_SECONDS: f64 = 60.0;

const ANCHOR_TOL: f64 = 1e-10;
const QUADRATURE_NODES: usize = 1_000_000;
/// One unit in the last printed decimal of the 0.50250 anchor.
const AVERAGE_DIGIT: f64 = 1e-5;

const KERNEL_TOL: f64 = 1e-10;
const KERNEL_INSTANCES: usize = 200;
const SIMPSON_NODES: usize = 1001;
const SIMPSON_TOL: f64 = 1e-8;
const SIMPSON_INSTANCES: usize = 100;

const CONTRACTIVE_DRAWS: usize = 50;
const CONTRACTIVE_SAMPLES: usize = 50;
const CONTRACTIVE_SLACK: f64 = 1e-9;

const SHARPNESS_BUDGET: usize = 1000;
const SHARPNESS_MARGIN: f64 = -2.0;

const MONO_INSTANCES: usize = 100;
const MONO_SLACK: f64 = 1e-10;

const EIG_MATRICES: usize = 500;
const EIG_TOL: f64 = 1e-10;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn scalar(v: f64) -> HpdMatrix {
    HpdMatrix::from_spectrum(vec![v], ComplexMatrix::identity(1))
}

fn one() -> ComplexMatrix {
    ComplexMatrix::identity(1)
}

fn entry(m: &ComplexMatrix) -> f64 {
    m[(0, 0)].re
}


fn instance(label: &str, i: usize) -> InstanceTriple {
    let dim = 1 + i % 6;
    InstanceTriple::random(dim, StreamSeed::new(SUITE_SEED).child_str(label).child(i as u64), (0.01, 100.0))
}

fn soundness_sweep() -> Outcome {
    let config = SuiteConfig {
        dims: SUITE_DIMS.to_vec(),
        samples: SUITE_SAMPLES,
        seed: SUITE_SEED,
        tolerance: SUITE_TOL,
        cases: None,
        cond_range: (0.01, 100.0),
    };
    let start = Instant::now();
    let report = match run_suite(&config) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("suite failed: {e}")),
    };
    let seconds = start.elapsed().as_secs_f64();
    let worst = report
        .cases
        .iter()
        .min_by(|a, b| a.min_margin.total_cmp(&b.min_margin))
        .expect("non-empty registry");
    let failing: Vec<&str> = report.cases.iter().filter(|c| c.violations > 0).map(|c| c.id.as_str()).collect();
    outcome(
        report.total_violations == 0 && seconds <= SUITE_SECONDS,
        format!(
            "{} cases, {} violations {:?}, worst normalized margin {:.3e} ({}), {:.1} s",
            report.cases.len(),
            report.total_violations,
            failing,
            worst.min_margin,
            worst.id,
            seconds
        ),
    )
}

/// Composite Simpson rule on `[lo, hi]` with an odd number of nodes.
fn simpson(lo: f64, hi: f64, nodes: usize, f: impl Fn(f64) -> f64) -> f64 {
    let n = nodes - 1;
    let h = (hi - lo) / n as f64;
    let inner: f64 = (1..n)
        .map(|i| {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            w * f(lo + i as f64 * h)
        })
        .sum();
    (f(lo) + f(hi) + inner) * h / 3.0
}

fn scalar_anchors() -> Outcome {
    let (a, b, x) = (scalar(4.0), scalar(1.0), one());
    let heinz = entry(&means::heinz(&a, &x, &b, 0.25).unwrap());
    let heron = entry(&means::heron(&a, &x, &b, 0.5).unwrap());
    let integral = entry(&means::integral_mean(&a, &x, &b).unwrap());
    let average = entry(&means::heinz_nu_average(&a, &x, &b, 0.375, 0.625).unwrap());

    let ln2 = 2f64.ln();
    let closed_average = 2.0 * (ln2 / 4.0).sinh() / ln2;
    let quadrature = simpson(0.375, 0.625, QUADRATURE_NODES + 1, |nu| (4f64.powf(nu) + 4f64.powf(1.0 - nu)) / 2.0);

    // the decimal anchors are printed to 10 digits
    let checks = [
        ("heinz", heinz, 2.121_320_343_6, ANCHOR_TOL),
        ("heinz oracle", heinz, (4f64.powf(0.25) + 4f64.powf(0.75)) / 2.0, ANCHOR_TOL),
        ("heron", heron, 2.25, ANCHOR_TOL),
        ("integral", integral, 3.0 / 4f64.ln(), ANCHOR_TOL),
        ("integral decimal", integral, 2.164_042_561_3, ANCHOR_TOL),
        ("average vs quadrature", average, quadrature, ANCHOR_TOL),
        ("closed form vs quadrature", closed_average, quadrature, ANCHOR_TOL),
    ];
    // the printed decimal 0.5025038 disagrees with its own closed form in the
    // sixth digit; the quadrature oracle sides with the closed form
    let printed_gap = average - 0.502_503_8;
    let mut worst = 0.0f64;
    let mut failed = Vec::new();
    for (name, got, want, tol) in checks {
        let err = (got - want).abs();
        worst = worst.max(err / tol);
        if err > tol {
            failed.push(format!("{name}: {got} vs {want}"));
        }
    }
    outcome(
        failed.is_empty(),
        format!(
            "heinz {heinz:.10}, heron {heron}, integral {integral:.10}, average {average:.10} (quadrature {quadrature:.10}); worst error/tolerance {worst:.2e}; printed 0.5025038 is off by {printed_gap:.2e} {}",
            failed.join("; ")
        ),
    )
}

fn oracle_equivalences() -> Outcome {
    let mut heinz_err = 0.0f64;
    let mut sinch_err = 0.0f64;
    for i in 0..KERNEL_INSTANCES {
        let inst = instance("kernel", i);
        for j in 0..=10 {
            let nu = j as f64 / 10.0;
            let direct = means::heinz(&inst.a, &inst.x, &inst.b, nu).unwrap();
            let kernel = apply_kernel(&KernelSpec::heinz(nu), &inst.a, &inst.b, &inst.x, 0.5).unwrap();
            heinz_err = heinz_err.max(kernel.max_abs_diff(&direct));
        }
        let direct = means::integral_mean(&inst.a, &inst.x, &inst.b).unwrap();
        let kernel = apply_kernel(&KernelSpec::Sinch, &inst.a, &inst.b, &inst.x, 0.5).unwrap();
        sinch_err = sinch_err.max(kernel.max_abs_diff(&direct));
    }

    let mut simpson_err = 0.0f64;
    for i in 0..SIMPSON_INSTANCES {
        let inst = instance("simpson", i);
        let n = inst.dim();
        let nodes: Vec<ComplexMatrix> = (0..SIMPSON_NODES)
            .map(|k| {
                let nu = k as f64 / (SIMPSON_NODES - 1) as f64;
                means::sandwich(&inst.a, &inst.x, &inst.b, nu, 1.0 - nu).unwrap()
            })
            .collect();
        let quad = ComplexMatrix::from_fn(n, |r, c| {
            let re = simpson(0.0, 1.0, SIMPSON_NODES, |nu| {
                nodes[(nu * (SIMPSON_NODES - 1) as f64).round() as usize][(r, c)].re
            });
            let im = simpson(0.0, 1.0, SIMPSON_NODES, |nu| {
                nodes[(nu * (SIMPSON_NODES - 1) as f64).round() as usize][(r, c)].im
            });
            c64::new(re, im)
        });
        let closed = means::integral_mean(&inst.a, &inst.x, &inst.b).unwrap();
        simpson_err = simpson_err.max(quad.max_abs_diff(&closed));
    }
    outcome(
        heinz_err <= KERNEL_TOL && sinch_err <= KERNEL_TOL && simpson_err <= SIMPSON_TOL,
        format!("cosh kernel vs heinz {heinz_err:.2e}, sinch vs integral {sinch_err:.2e}, Simpson vs integral {simpson_err:.2e}"),
    )
}

fn contractivity() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    let mut worst_family = 0;
    for family in ContractiveFamily::ALL {
        for draw in 0..CONTRACTIVE_DRAWS {
            let stream = StreamSeed::new(SUITE_SEED).child_str("contractive").child(family.part() as u64).child(draw as u64);
            let spec = family.sample(&mut stream.child_str("params").rng());
            for dim in 2..=6 {
                let mut rng = stream.child_str("operators").child(dim).rng();
                let a = random_hpd(dim as usize, &mut rng, (0.01, 100.0));
                let b = random_hpd(dim as usize, &mut rng, (0.01, 100.0));
                let r = contractivity_check(&spec, &a, &b, CONTRACTIVE_SAMPLES, stream.child_str("samples").child(dim)).unwrap();
                if r.max_ratio > worst {
                    worst = r.max_ratio;
                    worst_family = family.part();
                }
            }
        }
    }
    outcome(
        worst <= 1.0 + CONTRACTIVE_SLACK,
        format!("max Ky Fan ratio {worst:.15} (part {worst_family})"),
    )
}

fn range_sharpness() -> Outcome {
    let config = FuzzConfig {
        dim: 1,
        budget: SHARPNESS_BUDGET,
        seed: 0,
        overrides: vec![("nu".into(), 0.1), ("alpha".into(), 0.5)],
        ..FuzzConfig::default()
    };
    let out = fuzz(find_case("eq1.2").unwrap(), &config).unwrap();
    let margin = out.worst.as_ref().map_or(f64::INFINITY, |w| w.margin);

    // the witness a = 100, b = 1, x = 1 from the criterion, evaluated directly
    let params = MeanParams {
        nu: 0.1,
        alpha: 0.5,
        ..MeanParams::default()
    };
    let witness = InstanceTriple::new(scalar(100.0), scalar(1.0), one()).unwrap();
    let witness_margin = evaluate(find_case("eq1.2").unwrap(), &params, &witness, true).unwrap()[0].margins[0];
    let expected = 0.5 * 10.0 + 0.25 * 101.0 - (100f64.powf(0.1) + 100f64.powf(0.9)) / 2.0;

    let status = Command::new(env!("CARGO_BIN_EXE_meanforge"))
        .args(["fuzz", "--case", "eq1.2", "--set", "nu=0.1", "--set", "alpha=0.5", "--dim", "1"])
        .args(["--budget", &SHARPNESS_BUDGET.to_string(), "--expect-violation"])
        .output()
        .expect("binary runs");
    let code = status.status.code();
    outcome(
        out.evaluations <= SHARPNESS_BUDGET
            && margin <= SHARPNESS_MARGIN
            && (witness_margin - expected).abs() < 1e-12
            && code == Some(0),
        format!(
            "library margin {margin:.4} in {} evaluations; witness margin {witness_margin:.4}; binary exit {code:?}",
            out.evaluations
        ),
    )
}

fn average_constants() -> Outcome {
    let params = MeanParams {
        alpha: 0.5,
        ..MeanParams::default()
    };
    let inst = InstanceTriple::new(scalar(4.0), scalar(1.0), one()).unwrap();
    let chain = find_case("avg-14").unwrap().build(&params, &inst).unwrap();
    let lhs = entry(&chain.atoms[0]);
    let rhs = 0.25 * entry(&chain.atoms[1]);
    let margin = evaluate(find_case("avg-14").unwrap(), &params, &inst, false).unwrap()[0].margins[0];
    outcome(
        (lhs - 0.502_50).abs() < AVERAGE_DIGIT && (rhs - 0.5625).abs() < 1e-15 && (margin - (rhs - lhs)).abs() < 1e-15 && margin > 0.0,
        format!("{lhs:.5} <= {rhs:.4}, margin {margin:.5}"),
    )
}

fn alpha_monotonicity() -> Outcome {
    let (upper, lower) = alpha_grids();
    let mut worst_up = f64::INFINITY;
    let mut worst_low = f64::INFINITY;
    for i in 0..MONO_INSTANCES {
        let inst = instance("alpha", i);
        let profile = |alpha: f64| ky_fan_profile(&means::heron(&inst.a, &inst.x, &inst.b, alpha).unwrap()).unwrap();
        let ups: Vec<Vec<f64>> = upper.iter().map(|&a| profile(a)).collect();
        for w in ups.windows(2) {
            for (lo, hi) in w[0].iter().zip(&w[1]) {
                worst_up = worst_up.min(hi - lo);
            }
        }
        let half = &ups[0];
        for &a in &lower {
            for (v, h) in profile(a).iter().zip(half) {
                worst_low = worst_low.min(h - v);
            }
        }
    }
    outcome(
        worst_up >= -MONO_SLACK && worst_low >= -MONO_SLACK,
        format!("min step on [0.5, 10] {worst_up:.3e}, min gap to alpha = 0.5 on [0, 0.5] {worst_low:.3e}"),
    )
}

fn linear_algebra_floor() -> Outcome {
    let mut worst_recon = 0.0f64;
    let mut worst_unit = 0.0f64;
    for i in 0..EIG_MATRICES {
        let dim = 1 + i % 8;
        let mut rng = StreamSeed::new(SUITE_SEED).child_str("hermitian").child(i as u64).rng();
        let g = random_complex(dim, &mut rng);
        let m = (&g + &g.adjoint()).scale(0.5);
        let (values, v) = hermitian_eig(&m).unwrap();
        let recon = &(&v * &ComplexMatrix::from_real_diag(&values)) * &v.adjoint();
        worst_recon = worst_recon.max(recon.frobenius_distance(&m) / m.frobenius_norm().max(f64::MIN_POSITIVE));
        worst_unit = worst_unit.max((&v.adjoint() * &v).frobenius_distance(&ComplexMatrix::identity(dim)));
    }
    outcome(
        worst_recon <= EIG_TOL && worst_unit <= EIG_TOL,
        format!("reconstruction {worst_recon:.2e}, unitarity {worst_unit:.2e}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 soundness sweep", soundness_sweep),
        ("2 scalar anchors", scalar_anchors),
        ("3 oracle equivalences", oracle_equivalences),
        ("4 kernel contractivity", contractivity),
        ("5 range sharpness", range_sharpness),
        ("6 integral-average constants", average_constants),
        ("7 alpha monotonicity", alpha_monotonicity),
        ("8 linear-algebra floor", linear_algebra_floor),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let o = run();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {name}: {} ({:.2} s)", o.detail, start.elapsed().as_secs_f64());
        failures += usize::from(!o.passed);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
