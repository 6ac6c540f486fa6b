use std::fmt;
use std::sync::OnceLock;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Chain, InstanceTriple, Step};
use crate::dmap::{ContractiveFamily, KernelOperator, KernelSpec};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::means::{self, MeanParams};

pub type CaseRng = ChaCha8Rng;

/// Upper sampling cap for parameters that are unbounded above (`alpha`, `t >= 0`).
pub const UNBOUNDED_CAP: f64 = 10.0;

/// A real interval with independently open or closed ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub const fn closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_open: false,
            hi_open: false,
        }
    }

    pub const fn open(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_open: true,
            hi_open: true,
        }
    }

    pub const fn open_closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_open: true,
            hi_open: false,
        }
    }

    pub const fn at_least(lo: f64) -> Self {
        Self {
            lo,
            hi: f64::INFINITY,
            lo_open: false,
            hi_open: true,
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        let above = if self.lo_open { v > self.lo } else { v >= self.lo };
        let below = if self.hi_open { v < self.hi } else { v <= self.hi };
        above && below
    }

    /// Uniform draw (unbounded ends capped at [`UNBOUNDED_CAP`]), hitting
    /// each closed end with probability 0.1.
    pub fn sample(&self, rng: &mut CaseRng) -> f64 {
        if !self.lo_open && rng.random_bool(0.1) {
            return self.lo;
        }
        if !self.hi_open && self.hi.is_finite() && rng.random_bool(0.1) {
            return self.hi;
        }
        let hi = if self.hi.is_finite() {
            self.hi
        } else {
            UNBOUNDED_CAP.max(self.lo + 1.0)
        };
        loop {
            let v = rng.random_range(self.lo..=hi);
            if self.contains(v) {
                return v;
            }
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_open { '(' } else { '[' };
        let r = if self.hi_open { ')' } else { ']' };
        if self.hi.is_infinite() {
            write!(f, "{l}{}, inf)", self.lo)
        } else {
            write!(f, "{l}{}, {}{r}", self.lo, self.hi)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRange {
    pub name: &'static str,
    pub interval: Interval,
}

const fn range(name: &'static str, interval: Interval) -> ParamRange {
    ParamRange { name, interval }
}

/// Constraints coupling several parameters.
#[derive(Clone, Copy)]
struct Coupled {
    describe: &'static str,
    check: fn(&MeanParams) -> bool,
    sample: fn(&mut CaseRng, &mut MeanParams),
}

type Builder = fn(&MeanParams, &InstanceTriple) -> Result<Chain>;

/// One registered inequality.
#[derive(Clone)]
pub struct InequalityCase {
    pub id: &'static str,
    pub summary: &'static str,
    pub ranges: Vec<ParamRange>,
    coupled: Option<Coupled>,
    builder: Builder,
}

impl fmt::Debug for InequalityCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InequalityCase").field("id", &self.id).finish()
    }
}

impl InequalityCase {
    /// Human-readable valid ranges.
    pub fn describe_ranges(&self) -> String {
        let mut parts: Vec<String> = self
            .ranges
            .iter()
            .map(|r| format!("{} in {}", r.name, r.interval))
            .collect();
        if let Some(c) = &self.coupled {
            parts.push(c.describe.to_string());
        }
        if parts.is_empty() {
            "no parameters".to_string()
        } else {
            parts.join("; ")
        }
    }

    pub fn check(&self, params: &MeanParams) -> std::result::Result<(), String> {
        for r in &self.ranges {
            let v = params.get(r.name).expect("registered parameter");
            if !r.interval.contains(v) {
                return Err(format!("{}: {} = {v} not in {}", self.id, r.name, r.interval));
            }
        }
        if let Some(c) = &self.coupled {
            if !(c.check)(params) {
                return Err(format!("{}: violates {}", self.id, c.describe));
            }
        }
        Ok(())
    }

    /// Parameters drawn inside the valid ranges.
    pub fn sample_params(&self, rng: &mut CaseRng) -> MeanParams {
        let mut p = MeanParams::default();
        for r in &self.ranges {
            p.set(r.name, r.interval.sample(rng)).expect("registered parameter");
        }
        if let Some(c) = &self.coupled {
            (c.sample)(rng, &mut p);
        }
        debug_assert!(self.check(&p).is_ok(), "{}: {:?}", self.id, self.check(&p));
        p
    }

    pub fn build(&self, params: &MeanParams, inst: &InstanceTriple) -> Result<Chain> {
        (self.builder)(params, inst)
    }
}

/// All registered cases, in report order.
pub fn registry() -> &'static [InequalityCase] {
    static CASES: OnceLock<Vec<InequalityCase>> = OnceLock::new();
    CASES.get_or_init(build_registry)
}

pub fn find_case(id: &str) -> Result<&'static InequalityCase> {
    registry()
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::UnknownCase(id.to_string()))
}

// ---------------------------------------------------------------------------
// chain construction helpers

struct Ctx<'a> {
    inst: &'a InstanceTriple,
    atoms: Vec<ComplexMatrix>,
    steps: Vec<Step>,
}

impl<'a> Ctx<'a> {
    fn new(inst: &'a InstanceTriple) -> Self {
        Self {
            inst,
            atoms: Vec::new(),
            steps: Vec::new(),
        }
    }

    fn push(&mut self, m: ComplexMatrix) -> usize {
        self.atoms.push(m);
        self.atoms.len() - 1
    }

    fn step(&mut self, label: impl Into<String>, lhs: &[(f64, usize)], rhs: &[(f64, usize)]) {
        self.steps.push(Step {
            label: label.into(),
            lhs: lhs.to_vec(),
            rhs: rhs.to_vec(),
        });
    }

    /// Shorthand for `|||L||| <= |||R|||`.
    fn le(&mut self, label: impl Into<String>, l: usize, r: usize) {
        self.step(label, &[(1.0, l)], &[(1.0, r)]);
    }

    fn finish(self) -> Result<Chain> {
        Ok(Chain {
            atoms: self.atoms,
            steps: self.steps,
        })
    }

    fn heinz(&self, nu: f64) -> Result<ComplexMatrix> {
        means::heinz(&self.inst.a, &self.inst.x, &self.inst.b, nu)
    }

    fn heron(&self, alpha: f64) -> Result<ComplexMatrix> {
        means::heron(&self.inst.a, &self.inst.x, &self.inst.b, alpha)
    }

    fn geometric(&self) -> Result<ComplexMatrix> {
        means::geometric(&self.inst.a, &self.inst.x, &self.inst.b)
    }

    fn integral(&self) -> Result<ComplexMatrix> {
        means::integral_mean(&self.inst.a, &self.inst.x, &self.inst.b)
    }

    fn p_sum(&self, nu: f64, p: f64) -> Result<ComplexMatrix> {
        means::heinz_p_sum(&self.inst.a, &self.inst.x, &self.inst.b, nu, p)
    }

    fn p_diff(&self, nu: f64, p: f64) -> Result<ComplexMatrix> {
        means::heinz_p_diff(&self.inst.a, &self.inst.x, &self.inst.b, nu, p)
    }

    /// `A^p X + t (A^nu X B^{p-nu} +- A^{p-nu} X B^nu) +- X B^p`.
    fn perturbed_power_sum(&self, p: f64, nu: f64, t: f64, plus: bool) -> Result<ComplexMatrix> {
        let sign = if plus { 1.0 } else { -1.0 };
        let ap = means::sandwich(&self.inst.a, &self.inst.x, &self.inst.b, p, 0.0)?;
        let bp = means::sandwich(&self.inst.a, &self.inst.x, &self.inst.b, 0.0, p)?;
        let mid = if plus { self.p_sum(nu, p)? } else { self.p_diff(nu, p)? };
        Ok(ComplexMatrix::combination(&[(1.0, &ap), (t, &mid), (sign, &bp)]))
    }
}

// ---------------------------------------------------------------------------
// ranges

const NU_CLASSIC: ParamRange = range("nu", Interval::closed(0.25, 0.75));
const ALPHA: ParamRange = range("alpha", Interval::at_least(0.5));
const BETA: ParamRange = range("beta", Interval::closed(0.5, 1.0));
const GAMMA: ParamRange = range("gamma", Interval::closed(0.5, 1.0));

fn between(v: f64, a: f64, b: f64) -> bool {
    a.min(b) <= v && v <= a.max(b)
}

/// `nu <= 2r <= p` or `nu >= 2r >= p`.
fn order_condition(p: &MeanParams) -> bool {
    (p.nu <= 2.0 * p.r && 2.0 * p.r <= p.p) || (p.nu >= 2.0 * p.r && 2.0 * p.r >= p.p)
}

/// `r <= 0 <= p, r <= nu <= p/2` or the mirror image.
fn complementary_order(p: &MeanParams) -> bool {
    (p.r <= 0.0 && 0.0 <= p.p && p.r <= p.nu && p.nu <= p.p / 2.0)
        || (p.r >= 0.0 && 0.0 >= p.p && p.r >= p.nu && p.nu >= p.p / 2.0)
}

fn random_sign(rng: &mut CaseRng) -> f64 {
    if rng.random_bool(0.5) {
        -1.0
    } else {
        1.0
    }
}

fn with_boundary(rng: &mut CaseRng, lo: f64, hi: f64) -> f64 {
    if rng.random_bool(0.1) {
        lo
    } else if rng.random_bool(0.1) {
        hi
    } else {
        rng.random_range(lo..=hi)
    }
}

fn sample_eq2_10(rng: &mut CaseRng, p: &mut MeanParams) {
    let s = random_sign(rng);
    let pp = rng.random_range(0.25..=2.5);
    let nu = with_boundary(rng, 0.0, pp);
    let two_r = with_boundary(rng, nu, pp);
    p.p = s * pp;
    p.nu = s * nu;
    p.r = s * two_r / 2.0;
    p.t = with_boundary(rng, -1.0, 1.0);
}

fn check_eq2_10(p: &MeanParams) -> bool {
    order_condition(p) && between(p.nu, 0.0, p.p) && p.t.abs() <= 1.0
}

fn sample_eq2_11(rng: &mut CaseRng, p: &mut MeanParams) {
    let s = random_sign(rng);
    let pp: f64 = rng.random_range(1.0..=3.0);
    let nu = with_boundary(rng, 0.0, pp - 1.0);
    let two_r = with_boundary(rng, nu, pp);
    p.p = s * pp;
    p.nu = s * nu;
    p.r = s * two_r / 2.0;
    p.t = with_boundary(rng, -1.0, 1.0);
}

fn check_eq2_11(p: &MeanParams) -> bool {
    order_condition(p) && between(p.nu, 0.0, p.p) && (p.p - p.nu).abs() >= 1.0 && p.t.abs() <= 1.0
}

fn sample_complementary(rng: &mut CaseRng, p: &mut MeanParams) {
    let s = random_sign(rng);
    let pp = if rng.random_bool(0.1) { 2.0 } else { rng.random_range(0.05..=2.0) };
    let r = with_boundary(rng, -1.5, 0.0);
    let nu = with_boundary(rng, r, pp / 2.0);
    p.p = s * pp;
    p.r = s * r;
    p.nu = s * nu;
    p.t = if rng.random_bool(0.1) { 0.0 } else { rng.random_range(0.0..=UNBOUNDED_CAP) };
}

fn check_eq2_12(p: &MeanParams) -> bool {
    complementary_order(p) && p.t >= 0.0
}

fn check_eq2_13(p: &MeanParams) -> bool {
    check_eq2_12(p) && p.p != 2.0 * p.r
}

fn sample_f_shape(rng: &mut CaseRng, p: &mut MeanParams) {
    p.p = rng.random_range(-2.0..=2.0);
}

fn family_sampler(family: ContractiveFamily) -> fn(&mut CaseRng, &mut MeanParams) {
    fn fill(spec: KernelSpec, p: &mut MeanParams) {
        match spec {
            KernelSpec::CoshRatioT { r, s1, s2, t } | KernelSpec::SinhRatioT { r, s1, s2, t } => {
                p.r = r;
                p.s1 = s1;
                p.s2 = s2;
                p.t = t;
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
                p.r = r;
                p.r_prime = r_prime;
                p.s1 = s1;
                p.s2 = s2;
                p.alpha = alpha;
                p.beta = beta;
            }
            _ => unreachable!("contractive families only"),
        }
    }
    match family {
        ContractiveFamily::CoshRatio => |rng, p| fill(ContractiveFamily::CoshRatio.sample(rng), p),
        ContractiveFamily::CoshCombo => |rng, p| fill(ContractiveFamily::CoshCombo.sample(rng), p),
        ContractiveFamily::SinhRatio => |rng, p| fill(ContractiveFamily::SinhRatio.sample(rng), p),
        ContractiveFamily::SinhCombo => |rng, p| fill(ContractiveFamily::SinhCombo.sample(rng), p),
    }
}

/// Kernel of a contractive family built from the case parameters.
pub fn family_kernel(family: ContractiveFamily, p: &MeanParams) -> KernelSpec {
    match family {
        ContractiveFamily::CoshRatio => KernelSpec::CoshRatioT {
            r: p.r,
            s1: p.s1,
            s2: p.s2,
            t: p.t,
        },
        ContractiveFamily::CoshCombo => KernelSpec::CoshComboRatio {
            r: p.r,
            r_prime: p.r_prime,
            s1: p.s1,
            s2: p.s2,
            alpha: p.alpha,
            beta: p.beta,
        },
        ContractiveFamily::SinhRatio => KernelSpec::SinhRatioT {
            r: p.r,
            s1: p.s1,
            s2: p.s2,
            t: p.t,
        },
        ContractiveFamily::SinhCombo => KernelSpec::SinhComboRatio {
            r: p.r,
            r_prime: p.r_prime,
            s1: p.s1,
            s2: p.s2,
            alpha: p.alpha,
            beta: p.beta,
        },
    }
}

fn family_check(family: ContractiveFamily) -> fn(&MeanParams) -> bool {
    fn literal(family: ContractiveFamily, p: &MeanParams) -> bool {
        family_kernel(family, p).hypotheses().is_some_and(|h| h.literal)
    }
    match family {
        ContractiveFamily::CoshRatio => |p| literal(ContractiveFamily::CoshRatio, p),
        ContractiveFamily::CoshCombo => |p| literal(ContractiveFamily::CoshCombo, p),
        ContractiveFamily::SinhRatio => |p| literal(ContractiveFamily::SinhRatio, p),
        ContractiveFamily::SinhCombo => |p| literal(ContractiveFamily::SinhCombo, p),
    }
}

fn contractive_chain(family: ContractiveFamily, p: &MeanParams, inst: &InstanceTriple) -> Result<Chain> {
    let op = KernelOperator::new(&family_kernel(family, p), &inst.a, &inst.b, 0.0)?;
    let mut c = Ctx::new(inst);
    let t = c.push(inst.x.clone());
    let ft = c.push(op.apply(&inst.x)?);
    c.le("|||f(D) T||| <= |||T|||", ft, t);
    c.finish()
}

/// Window chains `H_nu <= (1-w) M_1 + w M_2 <= F_alpha`.
fn window_chain(
    inst: &InstanceTriple,
    p: &MeanParams,
    first: ComplexMatrix,
    second: ComplexMatrix,
    weight: f64,
    label: &str,
) -> Result<Chain> {
    let mut c = Ctx::new(inst);
    let h = c.push(c.heinz(p.nu)?);
    let mid = c.push(ComplexMatrix::combination(&[(1.0 - weight, &first), (weight, &second)]));
    let f = c.push(c.heron(p.alpha)?);
    c.le(format!("|||H_nu||| <= |||{label}|||"), h, mid);
    c.le(format!("|||{label}||| <= |||F_alpha|||"), mid, f);
    c.finish()
}

fn average_case(id: &'static str, summary: &'static str, lo: f64, hi: f64, factor: f64) -> InequalityCase {
    fn build_with(lo: f64, hi: f64, factor: f64, p: &MeanParams, inst: &InstanceTriple) -> Result<Chain> {
        let mut c = Ctx::new(inst);
        let avg = c.push(means::heinz_nu_average(&inst.a, &inst.x, &inst.b, lo, hi)?);
        let f = c.push(c.heron(p.alpha)?);
        c.step(format!("|||int H_nu||| <= {factor} |||F_alpha|||"), &[(1.0, avg)], &[(factor, f)]);
        c.finish()
    }
    // the four windows are fixed, so dispatch on id instead of capturing
    let builder: Builder = match id {
        "avg-12" => |p, i| build_with(0.25, 0.75, 0.5, p, i),
        "avg-14" => |p, i| build_with(0.375, 0.625, 0.25, p, i),
        "avg-716" => |p, i| build_with(9.0 / 32.0, 23.0 / 32.0, 7.0 / 16.0, p, i),
        "avg-516" => |p, i| build_with(11.0 / 32.0, 21.0 / 32.0, 5.0 / 16.0, p, i),
        _ => unreachable!("unknown average case"),
    };
    debug_assert!(((hi - lo) - factor).abs() < 1e-15);
    InequalityCase {
        id,
        summary,
        ranges: vec![ALPHA],
        coupled: None,
        builder,
    }
}

/// Heron weights for the monotonicity case: `0.5, 0.6, ..., 10` above and `0, 0.1, ..., 0.5` below.
pub fn alpha_grids() -> (Vec<f64>, Vec<f64>) {
    let upper = (5..=100).map(|i| i as f64 / 10.0).collect();
    let lower = (0..=5).map(|i| i as f64 / 10.0).collect();
    (upper, lower)
}

/// Offsets of the 41-point grid around `p/2` used by the shape case.
pub const F_SHAPE_POINTS: usize = 41;
pub const F_SHAPE_STEP: f64 = 0.05;

fn build_registry() -> Vec<InequalityCase> {
    let mut cases = vec![
        InequalityCase {
            id: "eq1.1",
            summary: "|||A^nu X B^(1-nu) + A^(1-nu) X B^nu||| <= 2/(2+t) |||AX + XB + t A^(1/2) X B^(1/2)|||",
            ranges: vec![NU_CLASSIC, range("t", Interval::open_closed(-2.0, 2.0))],
            coupled: None,
            builder: |p, inst| {
                let mut c = Ctx::new(inst);
                let lhs = c.push(c.p_sum(p.nu, 1.0)?);
                let g = c.geometric()?;
                let ax = &inst.a.power(1.0) * &inst.x;
                let xb = &inst.x * &inst.b.power(1.0);
                let rhs = c.push(ComplexMatrix::combination(&[(1.0, &ax), (1.0, &xb), (p.t, &g)]));
                c.step(
                    "|||A^nu X B^(1-nu) + A^(1-nu) X B^nu||| <= 2/(2+t) |||AX + XB + t S|||",
                    &[(1.0, lhs)],
                    &[(2.0 / (2.0 + p.t), rhs)],
                );
                c.finish()
            },
        },
        InequalityCase {
            id: "eq1.2",
            summary: "|||H_nu||| <= |||F_alpha|||",
            ranges: vec![NU_CLASSIC, ALPHA],
            coupled: None,
            builder: |p, inst| {
                let mut c = Ctx::new(inst);
                let h = c.push(c.heinz(p.nu)?);
                let f = c.push(c.heron(p.alpha)?);
                c.le("|||H_nu||| <= |||F_alpha|||", h, f);
                c.finish()
            },
        },
        InequalityCase {
            id: "eq1.3",
            summary: "|||A^(1/2) X B^(1/2)||| <= |||H_nu||| <= |||F_alpha|||",
            ranges: vec![NU_CLASSIC, ALPHA],
            coupled: None,
            builder: |p, inst| {
                let mut c = Ctx::new(inst);
                let g = c.push(c.geometric()?);
                let h = c.push(c.heinz(p.nu)?);
                let f = c.push(c.heron(p.alpha)?);
                c.le("|||S||| <= |||H_nu|||", g, h);
                c.le("|||H_nu||| <= |||F_alpha|||", h, f);
                c.finish()
            },
        },
        InequalityCase {
            id: "refAli",
            summary: "|||H_nu||| <= (4 r0 - 1) |||A^(1/2) X B^(1/2)||| + 2 (1 - 2 r0) |||F_alpha|||, r0 = min(nu, 1-nu)",
            ranges: vec![NU_CLASSIC, ALPHA],
            coupled: None,
            builder: |p, inst| {
                let mut c = Ctx::new(inst);
                let h = c.push(c.heinz(p.nu)?);
                let g = c.push(c.geometric()?);
                let f = c.push(c.heron(p.alpha)?);
                let r0 = p.r0();
                c.step(
                    "|||H_nu||| <= (4 r0 - 1) |||S||| + 2 (1 - 2 r0) |||F_alpha|||",
                    &[(1.0, h)],
                    &[(4.0 * r0 - 1.0, g), (2.0 * (1.0 - 2.0 * r0), f)],
                );
                c.finish()
            },
        },
        InequalityCase {
            id: "eq1.4-chain",
            summary: "|||A^(1/2) X B^(1/2)||| <= |||int_0^1 A^nu X B^(1-nu) dnu||| <= |||F_alpha|||",
            ranges: vec![ALPHA],
            coupled: None,
            builder: |p, inst| {
                let mut c = Ctx::new(inst);
                let g = c.push(c.geometric()?);
                let i = c.push(c.integral()?);
                let f = c.push(c.heron(p.alpha)?);
                c.le("|||S||| <= |||int A^nu X B^(1-nu)|||", g, i);
                c.le("|||int A^nu X B^(1-nu)||| <= |||F_alpha|||", i, f);
                c.finish()
            },
        },
        InequalityCase {
            id: "eq1.4-alpha-mono",
            summary: "alpha -> |||F_alpha||| is nondecreasing on [1/2, 10] and bounded by |||F_(1/2)||| on [0, 1/2]",
            ranges: vec![],
            coupled: None,
            builder: |_, inst| {
                let mut c = Ctx::new(inst);
                let g = c.geometric()?;
                let ax = &inst.a.power(1.0) * &inst.x;
                let xb = &inst.x * &inst.b.power(1.0);
                let arith = (&ax + &xb).scale(0.5);
                let heron = |alpha: f64| ComplexMatrix::combination(&[(1.0 - alpha, &g), (alpha, &arith)]);
                let (upper, lower) = alpha_grids();
                let up: Vec<usize> = upper.iter().map(|&a| c.push(heron(a))).collect();
                for (w, pair) in upper.windows(2).zip(up.windows(2)) {
                    c.le(format!("|||F_{}||| <= |||F_{}|||", w[0], w[1]), pair[0], pair[1]);
                }
                let half = up[0];
                for &a in &lower[..lower.len() - 1] {
                    let idx = c.push(heron(a));
                    c.le(format!("|||F_{a}||| <= |||F_0.5|||"), idx, half);
                }
                c.finish()
            },
        },
        InequalityCase {
            id: "eq2.2",
            summary: "|||H_nu||| <= |||(1-beta) A^(1/2) X B^(1/2) + beta H_(1/4)||| <= |||F_alpha|||",
            ranges: vec![range("nu", Interval::closed(0.375, 0.625)), BETA, ALPHA],
            coupled: None,
            builder: |p, inst| {
                let c = Ctx::new(inst);
                window_chain(inst, p, c.geometric()?, c.heinz(0.25)?, p.beta, "(1-beta) S + beta H_1/4")
            },
        },
        InequalityCase {
            id: "eq2.3",
            summary: "|||H_nu||| <= |||(1-beta) H_(3/8) + beta H_(1/4)||| <= |||F_alpha|||",
            ranges: vec![range("nu", Interval::closed(5.0 / 16.0, 11.0 / 16.0)), BETA, ALPHA],
            coupled: None,
            builder: |p, inst| {
                let c = Ctx::new(inst);
                window_chain(inst, p, c.heinz(0.375)?, c.heinz(0.25)?, p.beta, "(1-beta) H_3/8 + beta H_1/4")
            },
        },
        InequalityCase {
            id: "eq2.7",
            summary: "|||H_nu||| <= |||(1-beta) H_(5/16) + beta H_(1/4)||| <= |||F_alpha|||",
            ranges: vec![range("nu", Interval::closed(9.0 / 32.0, 23.0 / 32.0)), BETA, ALPHA],
            coupled: None,
            builder: |p, inst| {
                let c = Ctx::new(inst);
                window_chain(inst, p, c.heinz(5.0 / 16.0)?, c.heinz(0.25)?, p.beta, "(1-beta) H_5/16 + beta H_1/4")
            },
        },
        InequalityCase {
            id: "eq2.8",
            summary: "|||H_nu||| <= |||(1-gamma) H_(3/8) + gamma H_(5/16)||| <= |||(1-beta) H_(3/8) + beta H_(1/4)||| <= |||F_alpha|||",
            ranges: vec![range("nu", Interval::closed(11.0 / 32.0, 21.0 / 32.0)), BETA, GAMMA, ALPHA],
            coupled: None,
            builder: |p, inst| {
                let mut c = Ctx::new(inst);
                let h38 = c.heinz(0.375)?;
                let h516 = c.heinz(5.0 / 16.0)?;
                let h14 = c.heinz(0.25)?;
                let h = c.push(c.heinz(p.nu)?);
                let inner = c.push(ComplexMatrix::combination(&[(1.0 - p.gamma, &h38), (p.gamma, &h516)]));
                let outer = c.push(ComplexMatrix::combination(&[(1.0 - p.beta, &h38), (p.beta, &h14)]));
                let f = c.push(c.heron(p.alpha)?);
                c.le("|||H_nu||| <= |||(1-gamma) H_3/8 + gamma H_5/16|||", h, inner);
                c.le(
                    "|||(1-gamma) H_3/8 + gamma H_5/16||| <= |||(1-beta) H_3/8 + beta H_1/4|||",
                    inner,
                    outer,
                );
                c.le("|||(1-beta) H_3/8 + beta H_1/4||| <= |||F_alpha|||", outer, f);
                c.finish()
            },
        },
        InequalityCase {
            id: "eq2.9",
            summary: "|||H_nu||| <= |||(H_(1/8) + H_(3/8))/2||| <= |||int A^t X B^(1-t) dt||| <= |||(H_(1/4) + F_(1/2))/2||| <= |||F_alpha|||",
            ranges: vec![range("nu", Interval::open(0.25, 0.75)), ALPHA],
            coupled: None,
            builder: |p, inst| {
                let mut c = Ctx::new(inst);
                let h = c.push(c.heinz(p.nu)?);
                let low = c.push((&c.heinz(0.125)? + &c.heinz(0.375)?).scale(0.5));
                let i = c.push(c.integral()?);
                let high = c.push((&c.heinz(0.25)? + &c.heron(0.5)?).scale(0.5));
                let f = c.push(c.heron(p.alpha)?);
                c.le("|||H_nu||| <= |||(H_1/8 + H_3/8)/2|||", h, low);
                c.le("|||(H_1/8 + H_3/8)/2||| <= |||int A^t X B^(1-t)|||", low, i);
                c.le("|||int A^t X B^(1-t)||| <= |||(H_1/4 + F_1/2)/2|||", i, high);
                c.le("|||(H_1/4 + F_1/2)/2||| <= |||F_alpha|||", high, f);
                c.finish()
            },
        },
        average_case("avg-12", "|||int_(1/4)^(3/4) H_nu dnu||| <= 1/2 |||F_alpha|||", 0.25, 0.75, 0.5),
        average_case("avg-14", "|||int_(3/8)^(5/8) H_nu dnu||| <= 1/4 |||F_alpha|||", 0.375, 0.625, 0.25),
        average_case(
            "avg-716",
            "|||int_(9/32)^(23/32) H_nu dnu||| <= 7/16 |||F_alpha|||",
            9.0 / 32.0,
            23.0 / 32.0,
            7.0 / 16.0,
        ),
        average_case(
            "avg-516",
            "|||int_(11/32)^(21/32) H_nu dnu||| <= 5/16 |||F_alpha|||",
            11.0 / 32.0,
            21.0 / 32.0,
            5.0 / 16.0,
        ),
        InequalityCase {
            id: "eq2.10",
            summary: "(1+t) |||A^r X B^(p-r) + A^(p-r) X B^r||| <= |||A^p X + t (A^nu X B^(p-nu) + A^(p-nu) X B^nu) + X B^p|||",
            ranges: vec![],
            coupled: Some(Coupled {
                describe: "nu <= 2r <= p or nu >= 2r >= p; nu between 0 and p; |t| <= 1",
                check: check_eq2_10,
                sample: sample_eq2_10,
            }),
            builder: |p, inst| {
                let mut c = Ctx::new(inst);
                let lhs = c.push(c.p_sum(p.r, p.p)?);
                let rhs = c.push(c.perturbed_power_sum(p.p, p.nu, p.t, true)?);
                c.step("(1+t) |||sum_r||| <= |||A^p X + t sum_nu + X B^p|||", &[(1.0 + p.t, lhs)], &[(1.0, rhs)]);
                c.finish()
            },
        },
        InequalityCase {
            id: "eq2.11",
            summary: "(1+t) |||A^r X B^(p-r) - A^(p-r) X B^r||| <= |p-2r| |||A^p X + t (A^(p-nu) X B^nu - A^nu X B^(p-nu)) - X B^p|||",
            ranges: vec![],
            coupled: Some(Coupled {
                describe: "nu <= 2r <= p or nu >= 2r >= p; nu between 0 and p; |p - nu| >= 1; |t| <= 1",
                check: check_eq2_11,
                sample: sample_eq2_11,
            }),
            builder: |p, inst| {
                let mut c = Ctx::new(inst);
                // the t-term enters as A^(p-nu) X B^nu - A^nu X B^(p-nu); with the
                // opposite orientation the right side vanishes at nu = 0, t = 1
                let lhs = c.push(c.p_diff(p.r, p.p)?);
                let rhs = c.push(c.perturbed_power_sum(p.p, p.nu, -p.t, false)?);
                c.step(
                    "(1+t) |||diff_r||| <= |p-2r| |||A^p X - t diff_nu - X B^p|||",
                    &[(1.0 + p.t, lhs)],
                    &[((p.p - 2.0 * p.r).abs(), rhs)],
                );
                c.finish()
            },
        },
        InequalityCase {
            id: "eq2.12",
            summary: "|||A^p X + t (A^nu X B^(p-nu) + A^(p-nu) X B^nu) + X B^p||| <= (1+t) |||A^r X B^(p-r) + A^(p-r) X B^r|||",
            ranges: vec![],
            coupled: Some(Coupled {
                describe: "r <= 0 <= p and r <= nu <= p/2 (or mirrored); t >= 0",
                check: check_eq2_12,
                sample: sample_complementary,
            }),
            builder: |p, inst| {
                let mut c = Ctx::new(inst);
                let lhs = c.push(c.perturbed_power_sum(p.p, p.nu, p.t, true)?);
                let rhs = c.push(c.p_sum(p.r, p.p)?);
                c.step("|||A^p X + t sum_nu + X B^p||| <= (1+t) |||sum_r|||", &[(1.0, lhs)], &[(1.0 + p.t, rhs)]);
                c.finish()
            },
        },
        InequalityCase {
            id: "eq2.13",
            summary: "|||A^p X + t (A^nu X B^(p-nu) - A^(p-nu) X B^nu) - X B^p||| <= ((1+t)p - 2t nu)/(p-2r) |||A^r X B^(p-r) - A^(p-r) X B^r|||",
            ranges: vec![],
            coupled: Some(Coupled {
                describe: "r <= 0 <= p and r <= nu <= p/2 (or mirrored); t >= 0; p != 2r",
                check: check_eq2_13,
                sample: sample_complementary,
            }),
            builder: |p, inst| {
                let mut c = Ctx::new(inst);
                let lhs = c.push(c.perturbed_power_sum(p.p, p.nu, p.t, false)?);
                let rhs = c.push(c.p_diff(p.r, p.p)?);
                let factor = ((1.0 + p.t) * p.p - 2.0 * p.t * p.nu) / (p.p - 2.0 * p.r);
                c.step(
                    "|||A^p X + t diff_nu - X B^p||| <= ((1+t)p - 2t nu)/(p-2r) |||diff_r|||",
                    &[(1.0, lhs)],
                    &[(factor, rhs)],
                );
                c.finish()
            },
        },
        InequalityCase {
            id: "f-nu-shape",
            summary: "f(nu) = |||A^nu X B^(p-nu) + A^(p-nu) X B^nu||| decreases up to p/2, increases after, and is midpoint convex",
            ranges: vec![],
            coupled: Some(Coupled {
                describe: "p in [-2, 2]; 41-point nu grid of spacing 0.05 centred at p/2",
                check: |p| (-2.0..=2.0).contains(&p.p),
                sample: sample_f_shape,
            }),
            builder: |p, inst| {
                let mut c = Ctx::new(inst);
                let centre = F_SHAPE_POINTS / 2;
                let grid: Vec<f64> = (0..F_SHAPE_POINTS)
                    .map(|i| p.p / 2.0 + (i as f64 - centre as f64) * F_SHAPE_STEP)
                    .collect();
                let idx = grid
                    .iter()
                    .map(|&nu| Ok(c.push(c.p_sum(nu, p.p)?)))
                    .collect::<Result<Vec<_>>>()?;
                for i in 0..F_SHAPE_POINTS - 1 {
                    if i < centre {
                        c.le(format!("f({:.3}) <= f({:.3})", grid[i + 1], grid[i]), idx[i + 1], idx[i]);
                    } else {
                        c.le(format!("f({:.3}) <= f({:.3})", grid[i], grid[i + 1]), idx[i], idx[i + 1]);
                    }
                }
                for i in 1..F_SHAPE_POINTS - 1 {
                    c.step(
                        format!("f({:.3}) <= (f({:.3}) + f({:.3}))/2", grid[i], grid[i - 1], grid[i + 1]),
                        &[(1.0, idx[i])],
                        &[(0.5, idx[i - 1]), (0.5, idx[i + 1])],
                    );
                }
                c.finish()
            },
        },
    ];
    for family in ContractiveFamily::ALL {
        let (id, summary, builder): (&'static str, &'static str, Builder) = match family {
            ContractiveFamily::CoshRatio => (
                "prop2.1-1",
                "(1+t) cosh(rD) / (cosh(s1 D) + t cosh(s2 D)) is contractive",
                |p, i| contractive_chain(ContractiveFamily::CoshRatio, p, i),
            ),
            ContractiveFamily::CoshCombo => (
                "prop2.1-2",
                "(alpha cosh(rD) + (1-alpha) cosh(r'D)) / (beta cosh(s1 D) + (1-beta) cosh(s2 D)) is contractive",
                |p, i| contractive_chain(ContractiveFamily::CoshCombo, p, i),
            ),
            ContractiveFamily::SinhRatio => (
                "prop2.1-3",
                "(1+t) sinh(rD) / (r (sinh(s1 D) + t sinh(s2 D))) is contractive",
                |p, i| contractive_chain(ContractiveFamily::SinhRatio, p, i),
            ),
            ContractiveFamily::SinhCombo => (
                "prop2.1-4",
                "(alpha/r sinh(rD) + (1-alpha)/r' sinh(r'D)) / (beta sinh(s1 D) + (1-beta) sinh(s2 D)) is contractive",
                |p, i| contractive_chain(ContractiveFamily::SinhCombo, p, i),
            ),
        };
        cases.push(InequalityCase {
            id,
            summary,
            ranges: vec![],
            coupled: Some(Coupled {
                describe: "hypotheses of the family as stated (0 <= s2 <= s1 and r, r' <= (s1+s2)/2, or the mirrored branch)",
                check: family_check(family),
                sample: family_sampler(family),
            }),
            builder,
        });
    }
    cases
}
