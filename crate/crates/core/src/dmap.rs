//! Hyperbolic kernel calculus for the operator `D = L_{X1} - R_{Y1}`.
//!
//! With `A = e^{2 X1}` and `B = e^{2 Y1}`, write `A = U diag(a) U*` and
//! `B = V diag(b) V*`. In the rotated frame `U* T V` the operator `D` acts by
//! entrywise multiplication with `d(i, j) = (ln a_i - ln b_j) / 2`, so any
//! scalar kernel `f` gives `f(D) T = U (F o (U* T V)) V*` with
//! `F_ij = f(d(i, j))`. For example `cosh((2 nu - 1) D) T` with
//! `T = A^{1/2} X B^{1/2}` is the Heinz mean, and `sinh(D)/D T` is the
//! integral mean `int_0^1 A^nu X B^{1-nu} d nu`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{random_complex, ComplexMatrix, HpdMatrix, StreamSeed};
use crate::norms::ky_fan_profile;

/// Below this `|x|` the removable singularity of `sinh(x)/x` is handled by series.
pub const SERIES_THRESHOLD: f64 = 1e-5;
/// Beyond this `|x|` hyperbolic terms are carried as mantissa and exponent.
const EXP_SPLIT: f64 = 30.0;

/// `sinh(x)/x` with value 1 at the origin.
pub fn sinch(x: f64) -> f64 {
    if x.abs() < SERIES_THRESHOLD {
        let x2 = x * x;
        1.0 + x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0))
    } else {
        x.sinh() / x
    }
}

/// Shape of one term of a hyperbolic sum, as a function of `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TermShape {
    /// `1`
    Const,
    /// `d`
    Linear,
    /// `cosh(rate d)`
    Cosh(f64),
    /// `sinh(rate d)`
    Sinh(f64),
    /// `sinh(rate d) / rate`, equal to `d` at `rate = 0`.
    SinhOverRate(f64),
}

impl TermShape {
    fn is_odd(self) -> bool {
        matches!(self, TermShape::Linear | TermShape::Sinh(_) | TermShape::SinhOverRate(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coef: f64,
    pub shape: TermShape,
}

impl Term {
    pub fn new(coef: f64, shape: TermShape) -> Self {
        Self { coef, shape }
    }

    /// Value as `(mantissa, exponent)`, i.e. `mantissa * e^exponent`.
    /// With `over_d` the term is divided by `d` (odd terms only).
    fn scaled(&self, d: f64, over_d: bool) -> (f64, f64) {
        let c = self.coef;
        match self.shape {
            TermShape::Const => (if over_d { c / d } else { c }, 0.0),
            TermShape::Linear => (if over_d { c } else { c * d }, 0.0),
            TermShape::Cosh(a) => {
                let x = (a * d).abs();
                let (m, e) = if x < EXP_SPLIT {
                    (x.cosh(), 0.0)
                } else {
                    (0.5 * (1.0 + (-2.0 * x).exp()), x)
                };
                (if over_d { c * m / d } else { c * m }, e)
            }
            TermShape::Sinh(a) => {
                let x = a * d;
                if x.abs() < EXP_SPLIT {
                    if over_d {
                        (c * a * sinch(x), 0.0)
                    } else {
                        (c * x.sinh(), 0.0)
                    }
                } else {
                    let m = x.signum() * 0.5 * (1.0 - (-2.0 * x.abs()).exp());
                    (if over_d { c * m / d } else { c * m }, x.abs())
                }
            }
            TermShape::SinhOverRate(a) => {
                let x = a * d;
                let (m, e) = if x.abs() < EXP_SPLIT {
                    (sinch(x), 0.0)
                } else {
                    (0.5 * (1.0 - (-2.0 * x.abs()).exp()) / x.abs(), x.abs())
                };
                (if over_d { c * m } else { c * d * m }, e)
            }
        }
    }
}

fn scaled_sum(terms: &[Term], d: f64, over_d: bool) -> (f64, f64) {
    let parts: Vec<(f64, f64)> = terms.iter().map(|t| t.scaled(d, over_d)).collect();
    let top = parts.iter().map(|p| p.1).fold(0.0, f64::max);
    let sum = parts.iter().map(|(m, e)| m * (e - top).exp()).sum();
    (sum, top)
}

/// `sum(numerator) / sum(denominator)` of hyperbolic terms in `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicRatio {
    pub numerator: Vec<Term>,
    pub denominator: Vec<Term>,
}

impl HyperbolicRatio {
    pub fn new(numerator: Vec<Term>, denominator: Vec<Term>) -> Self {
        Self {
            numerator,
            denominator,
        }
    }

    pub fn polynomial(numerator: Vec<Term>) -> Self {
        Self::new(numerator, vec![Term::new(1.0, TermShape::Const)])
    }

    pub fn eval(&self, d: f64) -> Result<f64> {
        let all_odd = |ts: &[Term]| !ts.is_empty() && ts.iter().all(|t| t.shape.is_odd());
        // odd/odd ratios have a removable singularity at 0: divide both by d
        let over_d = all_odd(&self.numerator) && all_odd(&self.denominator);
        let (nm, ne) = scaled_sum(&self.numerator, d, over_d);
        let (dm, de) = scaled_sum(&self.denominator, d, over_d);
        if dm == 0.0 || !dm.is_finite() {
            return Err(Error::PoleError(d));
        }
        if nm == 0.0 {
            return Ok(0.0);
        }
        let v = nm / dm * (ne - de).exp();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::KernelOverflow(d))
        }
    }
}

/// A scalar function of `d`, applied to matrices as `f(D)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum KernelSpec {
    /// `cosh(scale d)`; `scale = 0` is the identity map.
    CoshScaled { scale: f64 },
    /// `(1+t) cosh(r d) / (cosh(s1 d) + t cosh(s2 d))`.
    CoshRatioT { r: f64, s1: f64, s2: f64, t: f64 },
    /// `(alpha cosh(r d) + (1-alpha) cosh(r' d)) / (beta cosh(s1 d) + (1-beta) cosh(s2 d))`.
    CoshComboRatio {
        r: f64,
        r_prime: f64,
        s1: f64,
        s2: f64,
        alpha: f64,
        beta: f64,
    },
    /// `(1+t) sinh(r d) / (r (sinh(s1 d) + t sinh(s2 d)))`.
    SinhRatioT { r: f64, s1: f64, s2: f64, t: f64 },
    /// `(alpha/r sinh(r d) + (1-alpha)/r' sinh(r' d)) / (beta sinh(s1 d) + (1-beta) sinh(s2 d))`.
    SinhComboRatio {
        r: f64,
        r_prime: f64,
        s1: f64,
        s2: f64,
        alpha: f64,
        beta: f64,
    },
    /// `sinh(d)/d`.
    Sinch,
    /// Logarithmic mean `L(a, b) / sqrt(ab)`, which in `d` is again `sinh(d)/d`.
    LogMean,
    /// `int_lo^hi cosh((2 nu - 1) d) d nu`.
    HeinzAverage { lo: f64, hi: f64 },
    Custom(HyperbolicRatio),
}

/// Which reading of the contractive-family hypotheses a parameter set satisfies.
///
/// `literal` takes "r, r' <= (s1+s2)/2" as printed; `absolute` requires
/// `|r|, |r'| <= |s1+s2|/2`, which is what evenness of `cosh` (and of
/// `sinh(r d)/r` in `r`) actually needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypotheses {
    pub literal: bool,
    pub absolute: bool,
}

fn exponent_conditions(rs: &[f64], s1: f64, s2: f64) -> Hypotheses {
    let mid = (s1 + s2) / 2.0;
    let positive = 0.0 <= s2 && s2 <= s1;
    let negative = s1 <= s2 && s2 <= 0.0;
    let literal = (positive && rs.iter().all(|&r| r <= mid)) || (negative && rs.iter().all(|&r| r >= mid));
    let absolute = (positive || negative) && rs.iter().all(|&r| r.abs() <= mid.abs());
    Hypotheses { literal, absolute }
}

impl KernelSpec {
    pub fn identity() -> Self {
        KernelSpec::CoshScaled { scale: 0.0 }
    }

    /// The Heinz kernel `cosh((2 nu - 1) d)`.
    pub fn heinz(nu: f64) -> Self {
        KernelSpec::CoshScaled {
            scale: 2.0 * nu - 1.0,
        }
    }

    pub fn to_ratio(&self) -> HyperbolicRatio {
        use TermShape::*;
        let t = Term::new;
        match *self {
            KernelSpec::CoshScaled { scale } => HyperbolicRatio::polynomial(vec![t(1.0, Cosh(scale))]),
            KernelSpec::CoshRatioT { r, s1, s2, t: w } => {
                HyperbolicRatio::new(vec![t(1.0 + w, Cosh(r))], vec![t(1.0, Cosh(s1)), t(w, Cosh(s2))])
            }
            KernelSpec::CoshComboRatio {
                r,
                r_prime,
                s1,
                s2,
                alpha,
                beta,
            } => HyperbolicRatio::new(
                vec![t(alpha, Cosh(r)), t(1.0 - alpha, Cosh(r_prime))],
                vec![t(beta, Cosh(s1)), t(1.0 - beta, Cosh(s2))],
            ),
            KernelSpec::SinhRatioT { r, s1, s2, t: w } => HyperbolicRatio::new(
                vec![t(1.0 + w, SinhOverRate(r))],
                vec![t(1.0, Sinh(s1)), t(w, Sinh(s2))],
            ),
            KernelSpec::SinhComboRatio {
                r,
                r_prime,
                s1,
                s2,
                alpha,
                beta,
            } => HyperbolicRatio::new(
                vec![t(alpha, SinhOverRate(r)), t(1.0 - alpha, SinhOverRate(r_prime))],
                vec![t(beta, Sinh(s1)), t(1.0 - beta, Sinh(s2))],
            ),
            KernelSpec::Sinch | KernelSpec::LogMean => HyperbolicRatio::new(vec![t(1.0, Sinh(1.0))], vec![t(1.0, Linear)]),
            KernelSpec::HeinzAverage { lo, hi } => HyperbolicRatio::new(
                vec![t(1.0, Sinh(2.0 * hi - 1.0)), t(-1.0, Sinh(2.0 * lo - 1.0))],
                vec![t(2.0, Linear)],
            ),
            KernelSpec::Custom(ref ratio) => ratio.clone(),
        }
    }

    fn params(&self) -> Vec<f64> {
        match *self {
            KernelSpec::CoshScaled { scale } => vec![scale],
            KernelSpec::CoshRatioT { r, s1, s2, t } | KernelSpec::SinhRatioT { r, s1, s2, t } => vec![r, s1, s2, t],
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
            } => vec![r, r_prime, s1, s2, alpha, beta],
            KernelSpec::HeinzAverage { lo, hi } => vec![lo, hi],
            KernelSpec::Sinch | KernelSpec::LogMean => vec![],
            KernelSpec::Custom(ref r) => r
                .numerator
                .iter()
                .chain(&r.denominator)
                .flat_map(|t| match t.shape {
                    TermShape::Cosh(a) | TermShape::Sinh(a) | TermShape::SinhOverRate(a) => vec![t.coef, a],
                    _ => vec![t.coef],
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.params().iter().any(|p| !p.is_finite()) {
            return Err(Error::Invalid(format!("non-finite kernel parameter in {self:?}")));
        }
        if let KernelSpec::HeinzAverage { lo, hi } = *self {
            if !(lo < hi) {
                return Err(Error::BadInterval(lo, hi));
            }
        }
        Ok(())
    }

    /// Hypothesis check for the four contractive families; `None` for other kinds.
    pub fn hypotheses(&self) -> Option<Hypotheses> {
        let t_ok = |t: f64| -1.0 < t && t <= 1.0;
        let ab_ok = |alpha: f64, beta: f64| (0.0..=1.0).contains(&alpha) && beta >= 0.5;
        let wide = |s1: f64, s2: f64| (s1 + s2).abs() >= 2.0;
        let and = |h: Hypotheses, extra: bool| Hypotheses {
            literal: h.literal && extra,
            absolute: h.absolute && extra,
        };
        match *self {
            KernelSpec::CoshRatioT { r, s1, s2, t } => Some(and(exponent_conditions(&[r], s1, s2), t_ok(t))),
            KernelSpec::CoshComboRatio {
                r,
                r_prime,
                s1,
                s2,
                alpha,
                beta,
            } => Some(and(exponent_conditions(&[r, r_prime], s1, s2), ab_ok(alpha, beta))),
            KernelSpec::SinhRatioT { r, s1, s2, t } => {
                Some(and(exponent_conditions(&[r], s1, s2), t_ok(t) && wide(s1, s2)))
            }
            KernelSpec::SinhComboRatio {
                r,
                r_prime,
                s1,
                s2,
                alpha,
                beta,
            } => Some(and(
                exponent_conditions(&[r, r_prime], s1, s2),
                ab_ok(alpha, beta) && wide(s1, s2),
            )),
            _ => None,
        }
    }
}

/// Evaluates the kernel at a single point `d`.
pub fn kernel_eval(spec: &KernelSpec, d: f64) -> Result<f64> {
    spec.validate()?;
    spec.to_ratio().eval(d)
}

/// The values `d(i, j) = (ln a_i - ln b_j) / 2`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DGrid {
    dim: usize,
    values: Vec<f64>,
}

impl DGrid {
    pub fn new(a: &HpdMatrix, b: &HpdMatrix) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimMismatch(a.dim(), b.dim()));
        }
        let n = a.dim();
        let mut values = Vec::with_capacity(n * n);
        for &la in a.log_eigenvalues() {
            for &lb in b.log_eigenvalues() {
                values.push((la - lb) / 2.0);
            }
        }
        Ok(Self { dim: n, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.dim + j]
    }

    /// Kernel values on the grid, row-major.
    pub fn evaluate(&self, spec: &KernelSpec) -> Result<Vec<f64>> {
        spec.validate()?;
        let ratio = spec.to_ratio();
        self.values.iter().map(|&d| ratio.eval(d)).collect()
    }
}

/// The map `X -> f(D) (A^e X B^e)`, stored as one Hadamard weight matrix in
/// the joint eigenframe so repeated applications reuse the kernel values.
#[derive(Debug, Clone)]
pub struct KernelOperator {
    left: ComplexMatrix,
    right: ComplexMatrix,
    weights: Vec<f64>,
}

impl KernelOperator {
    /// Operator `X -> f(D) (A^e X B^e)`.
    pub fn new(spec: &KernelSpec, a: &HpdMatrix, b: &HpdMatrix, base_exponent: f64) -> Result<Self> {
        let grid = DGrid::new(a, b)?;
        let mut weights = grid.evaluate(spec)?;
        if base_exponent != 0.0 {
            let n = grid.dim();
            let pa: Vec<f64> = a.eigenvalues().iter().map(|l| l.powf(base_exponent)).collect();
            let pb: Vec<f64> = b.eigenvalues().iter().map(|l| l.powf(base_exponent)).collect();
            for i in 0..n {
                for j in 0..n {
                    weights[i * n + j] *= pa[i] * pb[j];
                }
            }
        }
        Ok(Self {
            left: a.eigenvectors().clone(),
            right: b.eigenvectors().clone(),
            weights,
        })
    }

    pub fn dim(&self) -> usize {
        self.left.dim()
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.left.check_same_dim(x)?;
        let rotated = &(&self.left.adjoint() * x) * &self.right;
        let weighted = rotated.hadamard_real(&self.weights);
        Ok(&(&self.left * &weighted) * &self.right.adjoint())
    }
}

/// `f(D) T` with `T = A^e X B^e`, where `e` is `p/2` (1/2 for the classical means).
pub fn apply_kernel(
    spec: &KernelSpec,
    a: &HpdMatrix,
    b: &HpdMatrix,
    x: &ComplexMatrix,
    base_exponent: f64,
) -> Result<ComplexMatrix> {
    if a.dim() != x.dim() {
        return Err(Error::DimMismatch(a.dim(), x.dim()));
    }
    KernelOperator::new(spec, a, b, base_exponent)?.apply(x)
}

#[derive(Debug, Clone)]
pub struct ContractivityResult {
    /// `max ky_fan(f(D) T, k) / ky_fan(T, k)` over samples and orders.
    pub max_ratio: f64,
    pub worst_instance: ComplexMatrix,
    pub worst_sample: usize,
    pub worst_k: usize,
    /// Hypothesis flags for the contractive families, `None` otherwise.
    pub hypotheses: Option<Hypotheses>,
}

/// Samples random `T` and records the largest Ky Fan growth of `T -> f(D) T`.
///
/// Out-of-hypothesis parameters are evaluated anyway; the flag in the result
/// says whether they were in range.
pub fn contractivity_check(
    spec: &KernelSpec,
    a: &HpdMatrix,
    b: &HpdMatrix,
    sample_count: usize,
    stream: StreamSeed,
) -> Result<ContractivityResult> {
    let op = KernelOperator::new(spec, a, b, 0.0)?;
    let n = op.dim();
    let samples: Vec<(f64, usize, usize, ComplexMatrix)> = (0..sample_count.max(1))
        .into_par_iter()
        .map(|i| {
            let t = random_complex(n, &mut stream.child(i as u64).rng());
            let ft = op.apply(&t)?;
            let before = ky_fan_profile(&t)?;
            let after = ky_fan_profile(&ft)?;
            let (k, ratio) = after
                .iter()
                .zip(&before)
                .map(|(a, b)| if *b > 0.0 { a / b } else { 1.0 })
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (k, r)| if r > acc.1 { (k, r) } else { acc });
            Ok((ratio, i, k + 1, t))
        })
        .collect::<Result<_>>()?;
    let (max_ratio, worst_sample, worst_k, worst_instance) = samples
        .into_iter()
        .fold(None::<(f64, usize, usize, ComplexMatrix)>, |best, cur| match best {
            Some(b) if b.0 >= cur.0 => Some(b),
            _ => Some(cur),
        })
        .expect("at least one sample");
    Ok(ContractivityResult {
        max_ratio,
        worst_instance,
        worst_sample,
        worst_k,
        hypotheses: spec.hypotheses(),
    })
}

/// The four contractive families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContractiveFamily {
    CoshRatio,
    CoshCombo,
    SinhRatio,
    SinhCombo,
}

impl ContractiveFamily {
    pub const ALL: [ContractiveFamily; 4] = [
        ContractiveFamily::CoshRatio,
        ContractiveFamily::CoshCombo,
        ContractiveFamily::SinhRatio,
        ContractiveFamily::SinhCombo,
    ];

    /// 1-based part number in the usual listing of the families.
    pub fn part(self) -> usize {
        match self {
            ContractiveFamily::CoshRatio => 1,
            ContractiveFamily::CoshCombo => 2,
            ContractiveFamily::SinhRatio => 3,
            ContractiveFamily::SinhCombo => 4,
        }
    }

    pub fn from_part(part: usize) -> Option<Self> {
        Self::ALL.get(part.checked_sub(1)?).copied()
    }

    /// Draws parameters satisfying both readings of the hypotheses.
    ///
    /// Exponents are drawn on the `0 <= s2 <= s1` branch with
    /// `0 <= r, r' <= (s1+s2)/2`, then mirrored to the negative branch with
    /// probability 1/2. `t` is uniform on `(-1, 1]` and `beta` on `[1/2, 5]`,
    /// both with occasional exact boundary values.
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> KernelSpec {
        let wide = matches!(self, ContractiveFamily::SinhRatio | ContractiveFamily::SinhCombo);
        let s2: f64 = rng.random_range(0.0..2.0);
        let s1_lo = if wide { s2.max(2.0 - s2) } else { s2 };
        let s1 = s1_lo + rng.random_range(0.0..2.0);
        let mid = (s1 + s2) / 2.0;
        let pick_r = |rng: &mut R| if rng.random_bool(0.15) { mid } else { rng.random_range(0.0..=mid) };
        let r = pick_r(rng);
        let r_prime = pick_r(rng);
        let t = if rng.random_bool(0.1) { 1.0 } else { 1.0 - rng.random_range(0.0..2.0) };
        let t = if t <= -1.0 { 1.0 } else { t };
        let alpha = rng.random_range(0.0..=1.0);
        let beta = if rng.random_bool(0.15) { 0.5 } else { rng.random_range(0.5..=5.0) };
        let sign = if rng.random_bool(0.5) { -1.0 } else { 1.0 };
        let (r, r_prime, s1, s2) = (sign * r, sign * r_prime, sign * s1, sign * s2);
        match self {
            ContractiveFamily::CoshRatio => KernelSpec::CoshRatioT { r, s1, s2, t },
            ContractiveFamily::CoshCombo => KernelSpec::CoshComboRatio {
                r,
                r_prime,
                s1,
                s2,
                alpha,
                beta,
            },
            ContractiveFamily::SinhRatio => KernelSpec::SinhRatioT { r, s1, s2, t },
            ContractiveFamily::SinhCombo => KernelSpec::SinhComboRatio {
                r,
                r_prime,
                s1,
                s2,
                alpha,
                beta,
            },
        }
    }
}
