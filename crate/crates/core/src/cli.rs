//! Command-line front end. [`run`] returns the process exit code:
//! 0 success, 1 inequality violated or expectation unmet, 2 bad flags,
//! 3 numerical or I/O failure.

use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::dmap::{contractivity_check, ContractiveFamily, KernelSpec};
use crate::error::{Error, Result};
use crate::inequalities::{
    family_kernel, find_case, fuzz, run_suite, with_worker_pool, FuzzConfig, InstanceTriple, SuiteConfig,
};
use crate::linalg::{c64, ComplexMatrix, HpdMatrix, StreamSeed};
use crate::means::MeanParams;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Slack on the contractivity ratio before a kernel counts as expanding.
pub const CONTRACTIVITY_SLACK: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "meanforge", version, about = "Heinz/Heron mean inequalities: verify, fuzz, check kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check every registered inequality on random instances.
    Verify(VerifyArgs),
    /// Search for a counterexample to one inequality.
    Fuzz(FuzzArgs),
    /// Measure the largest Ky Fan growth of a kernel map f(D).
    Contractivity(ContractivityArgs),
    /// Write a random instance (A, B, X) as JSON.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
struct CondArgs {
    /// Smallest eigenvalue of generated A and B.
    #[arg(long, default_value = "0.01", value_parser = parse_number)]
    cond_lo: f64,
    /// Largest eigenvalue of generated A and B.
    #[arg(long, default_value = "100", value_parser = parse_number)]
    cond_hi: f64,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Comma-separated dimensions.
    #[arg(long, default_value = "1,2,3,4,5,6", value_delimiter = ',')]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative violation tolerance.
    #[arg(long, default_value = "1e-9", value_parser = parse_number)]
    tol: f64,
    /// Comma-separated case ids (default: all).
    #[arg(long, value_delimiter = ',')]
    cases: Option<Vec<String>>,
    #[command(flatten)]
    cond: CondArgs,
    /// Report path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write 0 for elapsedSeconds so reruns are byte-identical.
    #[arg(long)]
    omit_timing: bool,
}

#[derive(Debug, Args)]
struct FuzzArgs {
    #[arg(long)]
    case: String,
    /// Fix a parameter, e.g. `--set nu=1/10`. Repeatable.
    #[arg(long = "set", value_parser = parse_assignment)]
    set: Vec<(String, f64)>,
    #[arg(long, default_value_t = 1000)]
    budget: usize,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Succeed only if a violation is found.
    #[arg(long)]
    expect_violation: bool,
    /// Force B = A.
    #[arg(long)]
    tie_ab: bool,
    #[arg(long, default_value = "1e-9", value_parser = parse_number)]
    tol: f64,
    #[command(flatten)]
    cond: CondArgs,
    /// Where to write the witness instance (default: printed).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelName {
    Identity,
    /// cosh((2 nu - 1) d), the Heinz kernel.
    Cosh,
    Part1,
    Part2,
    Part3,
    Part4,
    Sinch,
    LogMean,
    HeinzAverage,
}

#[derive(Debug, Args)]
struct ContractivityArgs {
    #[arg(long, value_enum)]
    kernel: KernelName,
    /// Kernel parameter, e.g. `--set r=1/4`. Repeatable. Unset family
    /// parameters are drawn inside the hypotheses.
    #[arg(long = "set", value_parser = parse_assignment)]
    set: Vec<(String, f64)>,
    /// Lower end of the averaging window for `heinz-average`.
    #[arg(long, default_value = "3/8", value_parser = parse_number)]
    lo: f64,
    /// Upper end of the averaging window for `heinz-average`.
    #[arg(long, default_value = "5/8", value_parser = parse_number)]
    hi: f64,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    cond: CondArgs,
    /// Always exit 0 and just print the ratio.
    #[arg(long)]
    report_only: bool,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    cond: CondArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses a decimal or a `p/q` fraction.
pub fn parse_number(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| format!("bad numerator in `{s}`"))?;
            let q: f64 = q.trim().parse().map_err(|_| format!("bad denominator in `{s}`"))?;
            if q == 0.0 {
                return Err(format!("zero denominator in `{s}`"));
            }
            p / q
        }
        None => s.parse().map_err(|_| format!("`{s}` is not a number"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn parse_assignment(s: &str) -> std::result::Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let name = name.trim();
    if MeanParams::default().get(name).is_none() {
        return Err(format!("unknown parameter `{name}` (known: {})", MeanParams::NAMES.join(", ")));
    }
    Ok((name.to_string(), parse_number(value)?))
}

/// Entry point shared by the binary and the tests.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    let result = match cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Fuzz(a) => cmd_fuzz(a),
        Command::Contractivity(a) => cmd_contractivity(a),
        Command::Gen(a) => cmd_gen(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::UnknownCase(_) | Error::Invalid(_) | Error::BadInterval(..) | Error::BadExponent(_) => EXIT_USAGE,
        Error::RangeViolation(_) | Error::BadOrder { .. } | Error::DimMismatch(..) => EXIT_USAGE,
        _ => EXIT_NUMERIC,
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn cmd_verify(a: VerifyArgs) -> Result<i32> {
    let config = SuiteConfig {
        dims: a.dims,
        samples: a.samples,
        seed: a.seed,
        tolerance: a.tol,
        cases: a.cases,
        cond_range: (a.cond.cond_lo, a.cond.cond_hi),
    };
    let mut report = run_suite(&config)?;
    if a.omit_timing {
        report.elapsed_seconds = 0.0;
    }
    for c in &report.cases {
        eprintln!(
            "{:<18} min margin {:>12.4e}  violations {}",
            c.id, c.min_margin, c.violations
        );
    }
    eprintln!(
        "{} cases, {} violations, {:.2} s",
        report.cases.len(),
        report.total_violations,
        report.elapsed_seconds
    );
    write_output(a.out.as_deref(), &report.to_json())?;
    Ok(if report.total_violations == 0 { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_fuzz(a: FuzzArgs) -> Result<i32> {
    let case = find_case(&a.case)?;
    let config = FuzzConfig {
        dim: a.dim,
        budget: a.budget,
        seed: a.seed,
        overrides: a.set,
        tie_ab: a.tie_ab,
        cond_range: (a.cond.cond_lo, a.cond.cond_hi),
        tolerance: a.tol,
    };
    let outcome = fuzz(case, &config)?;
    println!("case {} after {} evaluations", case.id, outcome.evaluations);
    match &outcome.worst {
        Some(w) => {
            println!(
                "most negative margin {:.10e} (normalized {:.4e}) at step `{}`, Ky Fan k = {}",
                w.margin, w.normalized_margin, w.step, w.k
            );
            let witness = InstanceFile::from_instance(&w.instance).to_json();
            match &a.out {
                Some(path) => {
                    write_output(Some(path), &witness)?;
                    println!("witness instance: {}", path.display());
                }
                None => println!("witness instance:\n{witness}"),
            }
        }
        None => println!("every evaluation failed numerically"),
    }
    println!("violation: {}", if outcome.violation { "yes" } else { "no" });
    Ok(if a.expect_violation && outcome.violation {
        EXIT_OK
    } else {
        EXIT_FAIL
    })
}

fn contractivity_kernel(a: &ContractivityArgs) -> Result<KernelSpec> {
    let mut params = MeanParams::default();
    let family = match a.kernel {
        KernelName::Part1 => Some(1),
        KernelName::Part2 => Some(2),
        KernelName::Part3 => Some(3),
        KernelName::Part4 => Some(4),
        _ => None,
    }
    .and_then(ContractiveFamily::from_part);
    if let Some(f) = family {
        let drawn = f.sample(&mut StreamSeed::new(a.seed).child_str("kernel").rng());
        params = params_of(&drawn, params);
    }
    for (name, value) in &a.set {
        params.set(name, *value)?;
    }
    let spec = match (a.kernel, family) {
        (_, Some(f)) => family_kernel(f, &params),
        (KernelName::Identity, _) => KernelSpec::identity(),
        (KernelName::Cosh, _) => KernelSpec::heinz(params.nu),
        (KernelName::Sinch, _) => KernelSpec::Sinch,
        (KernelName::LogMean, _) => KernelSpec::LogMean,
        (KernelName::HeinzAverage, _) => KernelSpec::HeinzAverage { lo: a.lo, hi: a.hi },
        _ => unreachable!("family kernels handled above"),
    };
    spec.validate()?;
    Ok(spec)
}

fn params_of(spec: &KernelSpec, mut p: MeanParams) -> MeanParams {
    match *spec {
        KernelSpec::CoshRatioT { r, s1, s2, t } | KernelSpec::SinhRatioT { r, s1, s2, t } => {
            (p.r, p.s1, p.s2, p.t) = (r, s1, s2, t);
        }
        KernelSpec::CoshComboRatio {
            r,
            r_prime,
            s1,
            s2,
            alpha,
            beta,
        }
        | KernelSpec::SinhComboRatio {
            r,
            r_prime,
            s1,
            s2,
            alpha,
            beta,
        } => {
            (p.r, p.r_prime, p.s1, p.s2, p.alpha, p.beta) = (r, r_prime, s1, s2, alpha, beta);
        }
        _ => {}
    }
    p
}

fn cmd_contractivity(a: ContractivityArgs) -> Result<i32> {
    if a.dim == 0 || a.samples == 0 {
        return Err(Error::Invalid("dim and samples must be at least 1".into()));
    }
    let spec = contractivity_kernel(&a)?;
    let inst = InstanceTriple::random(
        a.dim,
        StreamSeed::new(a.seed).child_str("operators"),
        (a.cond.cond_lo, a.cond.cond_hi),
    );
    let result = with_worker_pool(|| {
        contractivity_check(&spec, &inst.a, &inst.b, a.samples, StreamSeed::new(a.seed).child_str("samples"))
    })?;
    println!("kernel {}", serde_json::to_string(&spec).expect("kernel is serializable"));
    println!(
        "maxRatio {:.15} (sample {}, Ky Fan k = {})",
        result.max_ratio, result.worst_sample, result.worst_k
    );
    if let Some(h) = result.hypotheses {
        println!("hypotheses: as stated {}, absolute-value reading {}", h.literal, h.absolute);
    }
    let contractive = result.max_ratio <= 1.0 + CONTRACTIVITY_SLACK;
    println!("contractive: {}", if contractive { "yes" } else { "no" });
    Ok(if contractive || a.report_only { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_gen(a: GenArgs) -> Result<i32> {
    let (lo, hi) = (a.cond.cond_lo, a.cond.cond_hi);
    if a.dim == 0 || !(lo > 0.0 && lo <= hi) {
        return Err(Error::Invalid("need dim >= 1 and 0 < cond-lo <= cond-hi".into()));
    }
    let inst = InstanceTriple::random(a.dim, StreamSeed::new(a.seed), (lo, hi));
    write_output(a.out.as_deref(), &InstanceFile::from_instance(&inst).to_json())?;
    Ok(EXIT_OK)
}

/// Tolerance on the relative Hermitian defect accepted by the instance loader.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// On-disk instance: row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub dim: usize,
    #[serde(rename = "A")]
    pub a: Vec<[f64; 2]>,
    #[serde(rename = "B")]
    pub b: Vec<[f64; 2]>,
    #[serde(rename = "X")]
    pub x: Vec<[f64; 2]>,
}

fn to_pairs(m: &ComplexMatrix) -> Vec<[f64; 2]> {
    m.as_slice().iter().map(|z| [z.re, z.im]).collect()
}

fn from_pairs(dim: usize, pairs: &[[f64; 2]], name: &str) -> Result<ComplexMatrix> {
    if pairs.len() != dim * dim {
        return Err(Error::Invalid(format!("{name} has {} entries, expected {}", pairs.len(), dim * dim)));
    }
    let m = ComplexMatrix::from_row_major(pairs.iter().map(|&[re, im]| c64::new(re, im)).collect())?;
    if !m.is_finite() {
        return Err(Error::Invalid(format!("{name} has non-finite entries")));
    }
    Ok(m)
}

impl InstanceFile {
    pub fn from_instance(inst: &InstanceTriple) -> Self {
        Self {
            dim: inst.dim(),
            a: to_pairs(inst.a.base()),
            b: to_pairs(inst.b.base()),
            x: to_pairs(&inst.x),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance is serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("bad instance file: {e}")))
    }

    /// Validates and decomposes the stored matrices.
    pub fn to_instance(&self) -> Result<InstanceTriple> {
        if self.dim == 0 {
            return Err(Error::Invalid("dim must be at least 1".into()));
        }
        let hpd = |pairs: &[[f64; 2]], name: &str| -> Result<HpdMatrix> {
            let m = from_pairs(self.dim, pairs, name)?;
            let defect = m.hermitian_defect();
            if defect > HERMITIAN_TOL {
                return Err(Error::NotHermitian(defect));
            }
            HpdMatrix::from_matrix(&m)
        };
        InstanceTriple::new(hpd(&self.a, "A")?, hpd(&self.b, "B")?, from_pairs(self.dim, &self.x, "X")?)
    }
}

pub fn load_instance(path: &Path) -> Result<InstanceTriple> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    InstanceFile::from_json(&text)?.to_instance()
}
