//! Every inequality of the Heinz/Heron family as a margin-reporting predicate.
//!
//! A case builds a [`Chain`]: a list of matrices ("atoms") and a list of
//! steps `sum c_i |||L_i||| <= sum d_j |||R_j|||` over them. Each step is
//! checked in every Ky Fan norm, which by Fan dominance covers every
//! unitarily invariant norm when both sides are single matrices.

mod fuzz;
mod registry;
mod suite;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{random_complex, random_hpd, ComplexMatrix, HpdMatrix, StreamSeed};
use crate::means::MeanParams;
use crate::norms::ky_fan_profile;

pub use fuzz::{fuzz, FuzzConfig, FuzzFinding, FuzzOutcome};
pub use registry::{
    alpha_grids, family_kernel, find_case, registry, CaseRng, InequalityCase, Interval, ParamRange, F_SHAPE_POINTS,
    F_SHAPE_STEP, UNBOUNDED_CAP,
};
pub use suite::{
    instance_seed, param_seed, run_suite, with_worker_pool, CaseRecord, StepRecord, SuiteConfig, VerificationReport,
    THREADS_ENV,
};

/// Default eigenvalue range for generated `A` and `B`.
pub const DEFAULT_COND_RANGE: (f64, f64) = (0.01, 100.0);
/// Default relative violation tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// `(A, B, X)` with `A, B` HPD, plus the stream it was drawn from, if any.
#[derive(Debug, Clone)]
pub struct InstanceTriple {
    pub a: HpdMatrix,
    pub b: HpdMatrix,
    pub x: ComplexMatrix,
    pub seed: Option<u64>,
}

impl InstanceTriple {
    pub fn new(a: HpdMatrix, b: HpdMatrix, x: ComplexMatrix) -> Result<Self> {
        if a.dim() != x.dim() {
            return Err(Error::DimMismatch(a.dim(), x.dim()));
        }
        if b.dim() != x.dim() {
            return Err(Error::DimMismatch(b.dim(), x.dim()));
        }
        Ok(Self { a, b, x, seed: None })
    }

    /// Draws `A`, `B` (eigenvalues log-uniform in `cond_range`) and a Gaussian `X`.
    pub fn random(dim: usize, seed: StreamSeed, cond_range: (f64, f64)) -> Self {
        let mut rng = seed.rng();
        let a = random_hpd(dim, &mut rng, cond_range);
        let b = random_hpd(dim, &mut rng, cond_range);
        let x = random_complex(dim, &mut rng);
        Self {
            a,
            b,
            x,
            seed: Some(seed.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }
}

/// One inequality `sum lhs <= sum rhs` over indices into [`Chain::atoms`].
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub label: String,
    pub lhs: Vec<(f64, usize)>,
    pub rhs: Vec<(f64, usize)>,
}

#[derive(Debug, Clone)]
pub struct Chain {
    pub atoms: Vec<ComplexMatrix>,
    pub steps: Vec<Step>,
}

/// Ky Fan margins of one step: `margins[k-1] = rhs_k - lhs_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepMargins {
    pub label: String,
    pub margins: Vec<f64>,
    /// `1 + |rhs_n|`, the trace-norm normalization of this step.
    pub scale: f64,
}

impl StepMargins {
    /// Smallest margin divided by `scale`, with its 1-based Ky Fan order.
    pub fn min_normalized(&self) -> (f64, usize) {
        self.margins
            .iter()
            .enumerate()
            .map(|(k, m)| (m / self.scale, k + 1))
            .fold((f64::INFINITY, 0), |acc, cur| if cur.0 < acc.0 { cur } else { acc })
    }

    pub fn min_raw(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn violations(&self, tol: f64) -> usize {
        self.margins.iter().filter(|&&m| m / self.scale < -tol).count()
    }
}

impl Chain {
    pub fn margins(&self) -> Result<Vec<StepMargins>> {
        let profiles = self
            .atoms
            .iter()
            .map(ky_fan_profile)
            .collect::<Result<Vec<_>>>()?;
        let n = profiles.first().map_or(0, Vec::len);
        let side = |terms: &[(f64, usize)], k: usize| terms.iter().map(|&(c, i)| c * profiles[i][k]).sum::<f64>();
        Ok(self
            .steps
            .iter()
            .map(|step| {
                let margins = (0..n).map(|k| side(&step.rhs, k) - side(&step.lhs, k)).collect();
                StepMargins {
                    label: step.label.clone(),
                    margins,
                    scale: 1.0 + side(&step.rhs, n - 1).abs(),
                }
            })
            .collect())
    }
}

/// Per-step Ky Fan margins of `case` on `inst`.
///
/// Parameters outside the case's valid ranges are rejected unless
/// `allow_out_of_range` is set.
pub fn evaluate(
    case: &InequalityCase,
    params: &MeanParams,
    inst: &InstanceTriple,
    allow_out_of_range: bool,
) -> Result<Vec<StepMargins>> {
    if !allow_out_of_range {
        case.check(params).map_err(Error::RangeViolation)?;
    }
    case.build(params, inst)?.margins()
}
