use rand::Rng;

use super::{evaluate, CaseRng, InequalityCase, InstanceTriple, DEFAULT_COND_RANGE, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::linalg::random::orthonormalize_columns;
use crate::linalg::{c64, ComplexMatrix, HpdMatrix, StreamSeed};
use crate::means::MeanParams;

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzConfig {
    pub dim: usize,
    /// Number of objective evaluations.
    pub budget: usize,
    pub seed: u64,
    /// Fixed parameter values. When non-empty the range check is skipped.
    pub overrides: Vec<(String, f64)>,
    /// Force `B = A`.
    pub tie_ab: bool,
    pub cond_range: (f64, f64),
    pub tolerance: f64,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self {
            dim: 2,
            budget: 1000,
            seed: 0,
            overrides: Vec::new(),
            tie_ab: false,
            cond_range: DEFAULT_COND_RANGE,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

/// The most negative margin seen, with everything needed to reproduce it.
#[derive(Debug, Clone)]
pub struct FuzzFinding {
    /// Smallest raw Ky Fan margin over all steps.
    pub margin: f64,
    /// The same margin divided by `1 + |||RHS|||_1`.
    pub normalized_margin: f64,
    pub step: String,
    pub k: usize,
    pub params: MeanParams,
    pub instance: InstanceTriple,
}

#[derive(Debug, Clone)]
pub struct FuzzOutcome {
    pub evaluations: usize,
    /// `None` only if every evaluation failed numerically.
    pub worst: Option<FuzzFinding>,
    /// True iff the worst normalized margin is below `-tolerance`.
    pub violation: bool,
}

/// Search coordinates: log-eigenvalues and frame entries of `A` and `B`,
/// and the entries of `X`.
#[derive(Debug, Clone)]
struct Point {
    params: MeanParams,
    coords: Vec<f64>,
}

struct Layout {
    dim: usize,
    tie_ab: bool,
    log_lo: f64,
    log_hi: f64,
}

impl Layout {
    fn hpd_len(&self) -> usize {
        self.dim + 2 * self.dim * self.dim
    }

    fn len(&self) -> usize {
        let blocks = if self.tie_ab { 1 } else { 2 };
        blocks * self.hpd_len() + 2 * self.dim * self.dim
    }

    fn is_log_eigenvalue(&self, i: usize) -> bool {
        let h = self.hpd_len();
        i < self.dim || (!self.tie_ab && (h..h + self.dim).contains(&i))
    }

    fn random(&self, rng: &mut CaseRng) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                if self.is_log_eigenvalue(i) {
                    rng.random_range(self.log_lo..=self.log_hi)
                } else {
                    rng.random_range(-1.0..=1.0)
                }
            })
            .collect()
    }

    fn clamp(&self, coords: &mut [f64]) {
        for (i, c) in coords.iter_mut().enumerate() {
            if self.is_log_eigenvalue(i) {
                *c = c.clamp(self.log_lo, self.log_hi);
            }
        }
    }

    fn complex_block(&self, coords: &[f64]) -> ComplexMatrix {
        let n = self.dim;
        ComplexMatrix::from_fn(n, |i, j| c64::new(coords[2 * (i * n + j)], coords[2 * (i * n + j) + 1]))
    }

    fn hpd(&self, coords: &[f64]) -> HpdMatrix {
        let n = self.dim;
        let eigs = coords[..n].iter().map(|l| l.exp()).collect();
        let frame = orthonormalize_columns(&self.complex_block(&coords[n..])).unwrap_or_else(|| ComplexMatrix::identity(n));
        HpdMatrix::from_spectrum(eigs, frame)
    }

    fn instance(&self, coords: &[f64]) -> InstanceTriple {
        let h = self.hpd_len();
        let a = self.hpd(&coords[..h]);
        let (b, rest) = if self.tie_ab {
            (a.clone(), &coords[h..])
        } else {
            (self.hpd(&coords[h..2 * h]), &coords[2 * h..])
        };
        let mut x = self.complex_block(rest);
        let norm = x.frobenius_norm();
        let target = (self.dim as f64).sqrt();
        x = if norm > 0.0 {
            x.scale(target / norm)
        } else {
            ComplexMatrix::identity(self.dim)
        };
        InstanceTriple { a, b, x, seed: None }
    }
}

struct Search<'a> {
    case: &'a InequalityCase,
    config: &'a FuzzConfig,
    layout: Layout,
    allow_out_of_range: bool,
    evaluations: usize,
    worst: Option<FuzzFinding>,
}

impl Search<'_> {
    fn exhausted(&self) -> bool {
        self.evaluations >= self.config.budget
    }

    /// Raw objective of `point`; failed evaluations score `+inf`.
    fn score(&mut self, point: &Point) -> f64 {
        self.evaluations += 1;
        let inst = self.layout.instance(&point.coords);
        let Ok(steps) = evaluate(self.case, &point.params, &inst, self.allow_out_of_range) else {
            return f64::INFINITY;
        };
        let mut best: Option<(f64, f64, &str, usize)> = None;
        for s in &steps {
            for (k, &m) in s.margins.iter().enumerate() {
                if best.is_none_or(|b| m < b.0) {
                    best = Some((m, m / s.scale, &s.label, k + 1));
                }
            }
        }
        let Some((margin, normalized, label, k)) = best else {
            return f64::INFINITY;
        };
        if !margin.is_finite() {
            return f64::INFINITY;
        }
        if self.worst.as_ref().is_none_or(|w| margin < w.margin) {
            self.worst = Some(FuzzFinding {
                margin,
                normalized_margin: normalized,
                step: label.to_string(),
                k,
                params: point.params,
                instance: inst,
            });
        }
        margin
    }

    /// Random draws; returns the best point seen.
    fn random_phase(&mut self, rng: &mut CaseRng, draws: usize, sample: &dyn Fn(&mut CaseRng) -> MeanParams) -> Option<(Point, f64)> {
        let mut best: Option<(Point, f64)> = None;
        for _ in 0..draws {
            if self.exhausted() {
                break;
            }
            let point = Point {
                params: sample(rng),
                coords: self.layout.random(rng),
            };
            let v = self.score(&point);
            if best.as_ref().is_none_or(|b| v < b.1) {
                best = Some((point, v));
            }
        }
        best
    }

    /// Coordinate descent with step halving; stops when the step is tiny.
    fn refine(&mut self, mut point: Point, mut value: f64) {
        let mut step = 0.5;
        while step > 1e-9 && !self.exhausted() {
            let mut improved = false;
            for i in 0..point.coords.len() {
                for dir in [1.0, -1.0] {
                    if self.exhausted() {
                        return;
                    }
                    let mut trial = point.clone();
                    trial.coords[i] += dir * step;
                    self.layout.clamp(&mut trial.coords);
                    if trial.coords[i] == point.coords[i] {
                        continue;
                    }
                    let v = self.score(&trial);
                    if v < value {
                        point = trial;
                        value = v;
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
    }
}

/// Minimizes the smallest Ky Fan margin of `case` over instances of one dimension.
///
/// Half the budget goes to random search; the rest alternates coordinate
/// descent from the best point with fresh random restarts. Without overrides,
/// parameters are resampled inside the valid ranges for every random draw.
pub fn fuzz(case: &InequalityCase, config: &FuzzConfig) -> Result<FuzzOutcome> {
    if config.budget == 0 {
        return Err(Error::Invalid("budget must be at least 1".into()));
    }
    if config.dim == 0 {
        return Err(Error::Invalid("dim must be at least 1".into()));
    }
    let (lo, hi) = config.cond_range;
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(Error::Invalid(format!("eigenvalue range [{lo}, {hi}] must satisfy 0 < lo <= hi")));
    }
    let mut probe = MeanParams::default();
    for (name, value) in &config.overrides {
        probe.set(name, *value)?;
    }
    let overrides = config.overrides.clone();
    let sample = move |rng: &mut CaseRng| {
        let mut p = case.sample_params(rng);
        for (name, value) in &overrides {
            p.set(name, *value).expect("validated above");
        }
        p
    };

    let mut rng = StreamSeed::new(config.seed).child_str("fuzz").child_str(case.id).rng();
    let mut search = Search {
        case,
        config,
        layout: Layout {
            dim: config.dim,
            tie_ab: config.tie_ab,
            log_lo: lo.ln(),
            log_hi: hi.ln(),
        },
        allow_out_of_range: !config.overrides.is_empty(),
        evaluations: 0,
        worst: None,
    };

    let mut start = search.random_phase(&mut rng, config.budget.div_ceil(2), &sample);
    while !search.exhausted() {
        if let Some((point, value)) = start.take() {
            if value.is_finite() {
                search.refine(point, value);
            }
        }
        let restart = (config.budget / 10).max(1);
        start = search.random_phase(&mut rng, restart, &sample);
    }

    let violation = search
        .worst
        .as_ref()
        .is_some_and(|w| w.normalized_margin < -config.tolerance);
    Ok(FuzzOutcome {
        evaluations: search.evaluations,
        worst: search.worst,
        violation,
    })
}
