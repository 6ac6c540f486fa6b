use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{evaluate, find_case, registry, InequalityCase, InstanceTriple, StepMargins};
use super::{DEFAULT_COND_RANGE, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::linalg::StreamSeed;
use crate::means::MeanParams;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "MEANFORGE_THREADS";

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub dims: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// Case ids to run; `None` runs the whole registry.
    pub cases: Option<Vec<String>>,
    pub cond_range: (f64, f64),
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            dims: (1..=6).collect(),
            samples: 200,
            seed: 0,
            tolerance: DEFAULT_TOLERANCE,
            cases: None,
            cond_range: DEFAULT_COND_RANGE,
        }
    }
}

impl SuiteConfig {
    fn validate(&self) -> Result<Vec<&'static InequalityCase>> {
        if self.samples == 0 {
            return Err(Error::Invalid("samples must be at least 1".into()));
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::Invalid("dims must be a non-empty list of positive integers".into()));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::Invalid(format!("tolerance {} must be non-negative", self.tolerance)));
        }
        let (lo, hi) = self.cond_range;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::Invalid(format!("eigenvalue range [{lo}, {hi}] must satisfy 0 < lo <= hi")));
        }
        match &self.cases {
            None => Ok(registry().iter().collect()),
            Some(ids) => ids.iter().map(|id| find_case(id)).collect(),
        }
    }
}

/// Worst result of one step of a case over all instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StepRecord {
    pub label: String,
    pub min_margin: f64,
    pub violations: usize,
    pub worst_k: usize,
    pub worst_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CaseRecord {
    pub id: String,
    /// Smallest margin over instances, steps and Ky Fan orders, each divided
    /// by `1 + |||RHS|||_1`.
    pub min_margin: f64,
    pub min_raw_margin: f64,
    pub violations: usize,
    /// Seed of the instance attaining `min_margin`; regenerate it with
    /// `InstanceTriple::random(worst_dim, StreamSeed(worst_seed), cond_range)`.
    pub worst_seed: u64,
    pub worst_dim: usize,
    pub worst_sample: usize,
    pub worst_params: MeanParams,
    pub steps: Vec<StepRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub seed: u64,
    pub dims: Vec<usize>,
    pub samples: usize,
    pub tolerance: f64,
    pub cond_range: (f64, f64),
    pub cases: Vec<CaseRecord>,
    pub total_violations: usize,
    pub elapsed_seconds: f64,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("bad report: {e}")))
    }

    /// Same report with the wall-clock field zeroed.
    pub fn without_timing(&self) -> Self {
        Self {
            elapsed_seconds: 0.0,
            ..self.clone()
        }
    }

    pub fn case(&self, id: &str) -> Option<&CaseRecord> {
        self.cases.iter().find(|c| c.id == id)
    }
}

/// Stream for the instance shared by every case at `(dim, sample)`.
pub fn instance_seed(master: u64, dim: usize, sample: usize) -> StreamSeed {
    StreamSeed::new(master)
        .child_str("instance")
        .child(dim as u64)
        .child(sample as u64)
}

/// Stream for the parameters of `case` at `(dim, sample)`.
pub fn param_seed(master: u64, case: &str, dim: usize, sample: usize) -> StreamSeed {
    StreamSeed::new(master)
        .child_str(case)
        .child(dim as u64)
        .child(sample as u64)
}

/// Runs `f` on a pool capped by `MEANFORGE_THREADS`, if set.
pub fn with_worker_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let cap = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0);
    match cap.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}

struct Outcome {
    sample: usize,
    dim: usize,
    seed: u64,
    params: MeanParams,
    steps: Vec<StepMargins>,
}

/// Checks every selected case on `samples` random instances per dimension.
pub fn run_suite(config: &SuiteConfig) -> Result<VerificationReport> {
    let cases = config.validate()?;
    let start = Instant::now();
    let slots: Vec<(usize, usize)> = config
        .dims
        .iter()
        .flat_map(|&d| (0..config.samples).map(move |i| (d, i)))
        .collect();

    let records = with_worker_pool(|| {
        let instances: Vec<InstanceTriple> = slots
            .par_iter()
            .map(|&(d, i)| InstanceTriple::random(d, instance_seed(config.seed, d, i), config.cond_range))
            .collect();
        cases
            .iter()
            .map(|case| {
                let outcomes = slots
                    .par_iter()
                    .zip(instances.par_iter())
                    .map(|(&(dim, sample), inst)| {
                        let params = case.sample_params(&mut param_seed(config.seed, case.id, dim, sample).rng());
                        let steps = evaluate(case, &params, inst, false)?;
                        Ok(Outcome {
                            sample,
                            dim,
                            seed: inst.seed.expect("random instance"),
                            params,
                            steps,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(merge(case.id, &outcomes, config.tolerance))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let total_violations = records.iter().map(|c| c.violations).sum();
    Ok(VerificationReport {
        seed: config.seed,
        dims: config.dims.clone(),
        samples: config.samples,
        tolerance: config.tolerance,
        cond_range: config.cond_range,
        cases: records,
        total_violations,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

fn merge(id: &str, outcomes: &[Outcome], tol: f64) -> CaseRecord {
    let first = &outcomes[0];
    let mut steps: Vec<StepRecord> = first
        .steps
        .iter()
        .map(|s| StepRecord {
            label: s.label.clone(),
            min_margin: f64::INFINITY,
            violations: 0,
            worst_k: 0,
            worst_dim: 0,
        })
        .collect();
    let mut record = CaseRecord {
        id: id.to_string(),
        min_margin: f64::INFINITY,
        min_raw_margin: f64::INFINITY,
        violations: 0,
        worst_seed: first.seed,
        worst_dim: first.dim,
        worst_sample: first.sample,
        worst_params: first.params,
        steps: Vec::new(),
    };
    for o in outcomes {
        for (rec, margins) in steps.iter_mut().zip(&o.steps) {
            let (m, k) = margins.min_normalized();
            let v = margins.violations(tol);
            rec.violations += v;
            record.violations += v;
            record.min_raw_margin = record.min_raw_margin.min(margins.min_raw());
            if m < rec.min_margin {
                rec.min_margin = m;
                rec.worst_k = k;
                rec.worst_dim = o.dim;
            }
            if m < record.min_margin {
                record.min_margin = m;
                record.worst_seed = o.seed;
                record.worst_dim = o.dim;
                record.worst_sample = o.sample;
                record.worst_params = o.params;
            }
        }
    }
    record.steps = steps;
    record
}
