//! Heinz, Heron and related operator means of `(A, X, B)` with `A, B` HPD.

use serde::{Deserialize, Serialize};

use crate::dmap::{apply_kernel, KernelSpec};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HpdMatrix};

/// Parameters shared by the mean constructions and the inequality registry.
///
/// `delta` is accepted for completeness but no construction reads it. `s1`
/// and `s2` are only used by the contractive-kernel cases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanParams {
    pub nu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub p: f64,
    pub r: f64,
    pub r_prime: f64,
    pub t: f64,
    pub s1: f64,
    pub s2: f64,
}

impl Default for MeanParams {
    fn default() -> Self {
        Self {
            nu: 0.5,
            alpha: 0.5,
            beta: 0.5,
            gamma: 0.5,
            delta: 0.5,
            p: 1.0,
            r: 0.25,
            r_prime: 0.25,
            t: 0.0,
            s1: 1.0,
            s2: 0.0,
        }
    }
}

impl MeanParams {
    pub const NAMES: [&'static str; 11] = [
        "nu", "alpha", "beta", "gamma", "delta", "p", "r", "r_prime", "t", "s1", "s2",
    ];

    /// `min(nu, 1 - nu)`, always recomputed from `nu`.
    pub fn r0(&self) -> f64 {
        self.nu.min(1.0 - self.nu)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "nu" => self.nu,
            "alpha" => self.alpha,
            "beta" => self.beta,
            "gamma" => self.gamma,
            "delta" => self.delta,
            "p" => self.p,
            "r" => self.r,
            "r_prime" | "rp" => self.r_prime,
            "t" => self.t,
            "s1" => self.s1,
            "s2" => self.s2,
            _ => return None,
        })
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = match name {
            "nu" => &mut self.nu,
            "alpha" => &mut self.alpha,
            "beta" => &mut self.beta,
            "gamma" => &mut self.gamma,
            "delta" => &mut self.delta,
            "p" => &mut self.p,
            "r" => &mut self.r,
            "r_prime" | "rp" => &mut self.r_prime,
            "t" => &mut self.t,
            "s1" => &mut self.s1,
            "s2" => &mut self.s2,
            _ => return Err(Error::Invalid(format!("unknown parameter `{name}`"))),
        };
        if !value.is_finite() {
            return Err(Error::Invalid(format!("parameter `{name}` must be finite")));
        }
        *slot = value;
        Ok(())
    }
}

fn check_dims(a: &HpdMatrix, x: &ComplexMatrix, b: &HpdMatrix) -> Result<()> {
    if a.dim() != x.dim() {
        return Err(Error::DimMismatch(a.dim(), x.dim()));
    }
    if b.dim() != x.dim() {
        return Err(Error::DimMismatch(b.dim(), x.dim()));
    }
    Ok(())
}

/// `A^s X B^u`.
pub fn sandwich(a: &HpdMatrix, x: &ComplexMatrix, b: &HpdMatrix, s: f64, u: f64) -> Result<ComplexMatrix> {
    check_dims(a, x, b)?;
    Ok(&(&a.power(s) * x) * &b.power(u))
}

/// `A^{1/2} X B^{1/2}`.
pub fn geometric(a: &HpdMatrix, x: &ComplexMatrix, b: &HpdMatrix) -> Result<ComplexMatrix> {
    sandwich(a, x, b, 0.5, 0.5)
}

/// `(A^nu X B^{1-nu} + A^{1-nu} X B^nu) / 2`.
pub fn heinz(a: &HpdMatrix, x: &ComplexMatrix, b: &HpdMatrix, nu: f64) -> Result<ComplexMatrix> {
    Ok(heinz_p_sum(a, x, b, nu, 1.0)?.scale(0.5))
}

/// `(1 - alpha) A^{1/2} X B^{1/2} + alpha (A X + X B) / 2`.
pub fn heron(a: &HpdMatrix, x: &ComplexMatrix, b: &HpdMatrix, alpha: f64) -> Result<ComplexMatrix> {
    check_dims(a, x, b)?;
    let g = geometric(a, x, b)?;
    let ax = &a.power(1.0) * x;
    let xb = x * &b.power(1.0);
    Ok(ComplexMatrix::combination(&[
        (1.0 - alpha, &g),
        (0.5 * alpha, &ax),
        (0.5 * alpha, &xb),
    ]))
}

/// `A^nu X B^{p-nu} + A^{p-nu} X B^nu`.
pub fn heinz_p_sum(a: &HpdMatrix, x: &ComplexMatrix, b: &HpdMatrix, nu: f64, p: f64) -> Result<ComplexMatrix> {
    let first = sandwich(a, x, b, nu, p - nu)?;
    let second = sandwich(a, x, b, p - nu, nu)?;
    Ok(&first + &second)
}

/// `A^nu X B^{p-nu} - A^{p-nu} X B^nu`.
pub fn heinz_p_diff(a: &HpdMatrix, x: &ComplexMatrix, b: &HpdMatrix, nu: f64, p: f64) -> Result<ComplexMatrix> {
    let first = sandwich(a, x, b, nu, p - nu)?;
    let second = sandwich(a, x, b, p - nu, nu)?;
    Ok(&first - &second)
}

/// Below this `|ln a - ln b|` the logarithmic mean switches to its Taylor series.
const LOG_MEAN_SERIES: f64 = 1e-5;

/// `L(a, b) = (a - b) / (ln a - ln b)` with `L(a, a) = a`.
pub fn log_mean(a: f64, b: f64) -> f64 {
    log_mean_from_logs(a, b, a.ln(), b.ln())
}

fn log_mean_from_logs(a: f64, b: f64, la: f64, lb: f64) -> f64 {
    let gap = la - lb;
    if gap.abs() > LOG_MEAN_SERIES {
        (a - b) / gap
    } else {
        // sqrt(ab) sinh(h)/h with h = gap/2
        let h2 = gap * gap / 4.0;
        ((la + lb) / 2.0).exp() * (1.0 + h2 / 6.0 + h2 * h2 / 120.0 + h2 * h2 * h2 / 5040.0)
    }
}

/// `int_0^1 A^nu X B^{1-nu} d nu`, in closed form through the logarithmic mean.
pub fn integral_mean(a: &HpdMatrix, x: &ComplexMatrix, b: &HpdMatrix) -> Result<ComplexMatrix> {
    check_dims(a, x, b)?;
    let n = x.dim();
    let u = a.eigenvectors();
    let v = b.eigenvectors();
    let rotated = &(&u.adjoint() * x) * v;
    let weights: Vec<f64> = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            log_mean_from_logs(
                a.eigenvalues()[i],
                b.eigenvalues()[j],
                a.log_eigenvalues()[i],
                b.log_eigenvalues()[j],
            )
        })
        .collect();
    Ok(&(u * &rotated.hadamard_real(&weights)) * &v.adjoint())
}

/// `int_lo^hi H_nu(A, X, B) d nu` (the integral, not the average).
pub fn heinz_nu_average(a: &HpdMatrix, x: &ComplexMatrix, b: &HpdMatrix, lo: f64, hi: f64) -> Result<ComplexMatrix> {
    if !(lo < hi) {
        return Err(Error::BadInterval(lo, hi));
    }
    check_dims(a, x, b)?;
    apply_kernel(&KernelSpec::HeinzAverage { lo, hi }, a, b, x, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, random_complex, random_hpd, StreamSeed};

    fn scalar_hpd(v: f64) -> HpdMatrix {
        HpdMatrix::from_matrix(&ComplexMatrix::scalar(c64::new(v, 0.0))).unwrap()
    }

    fn one() -> ComplexMatrix {
        ComplexMatrix::scalar(c64::new(1.0, 0.0))
    }

    fn value(m: &ComplexMatrix) -> f64 {
        assert!(m[(0, 0)].im.abs() < 1e-15);
        m[(0, 0)].re
    }

    fn triple(seed: u64, n: usize) -> (HpdMatrix, ComplexMatrix, HpdMatrix) {
        let mut rng = StreamSeed::new(seed).rng();
        let a = random_hpd(n, &mut rng, (0.05, 20.0));
        let b = random_hpd(n, &mut rng, (0.05, 20.0));
        (a, random_complex(n, &mut rng), b)
    }

    #[test]
    fn scalar_anchors() {
        let (a, b, x) = (scalar_hpd(4.0), scalar_hpd(1.0), one());
        assert!((value(&heinz(&a, &x, &b, 0.25).unwrap()) - 1.5 * 2f64.sqrt()).abs() < 1e-14);
        assert!((value(&heron(&a, &x, &b, 0.5).unwrap()) - 2.25).abs() < 1e-14);
        assert!((value(&integral_mean(&a, &x, &b).unwrap()) - 3.0 / 4f64.ln()).abs() < 1e-14);
        assert!((value(&heinz_p_sum(&a, &x, &b, 0.5, 2.0).unwrap()) - 10.0).abs() < 1e-13);
    }

    #[test]
    fn heinz_endpoints_and_symmetry() {
        let (a, x, b) = triple(1, 4);
        let h0 = heinz(&a, &x, &b, 0.0).unwrap();
        let arith = (&(&a.power(1.0) * &x) + &(&x * &b.power(1.0))).scale(0.5);
        assert!(h0.frobenius_distance(&arith) < 1e-12 * arith.frobenius_norm());
        let h_half = heinz(&a, &x, &b, 0.5).unwrap();
        let g = geometric(&a, &x, &b).unwrap();
        assert!(h_half.frobenius_distance(&g) < 1e-12 * g.frobenius_norm());
        let h3 = heinz(&a, &x, &b, 0.3).unwrap();
        let h7 = heinz(&a, &x, &b, 0.7).unwrap();
        assert!(h3.frobenius_distance(&h7) < 1e-10 * h3.frobenius_norm());
    }

    #[test]
    fn heron_endpoints() {
        let (a, x, b) = triple(2, 3);
        let g = geometric(&a, &x, &b).unwrap();
        assert!(heron(&a, &x, &b, 0.0).unwrap().frobenius_distance(&g) < 1e-12 * g.frobenius_norm());
        let h0 = heinz(&a, &x, &b, 0.0).unwrap();
        assert!(heron(&a, &x, &b, 1.0).unwrap().frobenius_distance(&h0) < 1e-12 * h0.frobenius_norm());
    }

    #[test]
    fn p_sum_and_diff() {
        let (a, x, b) = triple(3, 3);
        let s = heinz_p_sum(&a, &x, &b, 0.2, 1.0).unwrap();
        let h = heinz(&a, &x, &b, 0.2).unwrap().scale(2.0);
        assert!(s.frobenius_distance(&h) < 1e-13 * h.frobenius_norm());
        let d = heinz_p_diff(&a, &x, &b, 0.75, 1.5).unwrap();
        assert!(d.frobenius_norm() < 1e-13);
    }

    #[test]
    fn integral_mean_removable_singularity() {
        let c = HpdMatrix::from_matrix(&ComplexMatrix::identity(3).scale(2.5)).unwrap();
        let x = random_complex(3, &mut StreamSeed::new(4).rng());
        let m = integral_mean(&c, &x, &c).unwrap();
        assert!(m.frobenius_distance(&x.scale(2.5)) < 1e-13);
    }

    #[test]
    fn integral_mean_diagonal_entries() {
        let e2 = std::f64::consts::E.powi(2);
        let a = HpdMatrix::from_matrix(&ComplexMatrix::from_real_diag(&[1.0, e2])).unwrap();
        let b = HpdMatrix::from_matrix(&ComplexMatrix::identity(2)).unwrap();
        let ones = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let m = integral_mean(&a, &ones, &b).unwrap();
        // row for the eigenvalue e^2
        let expected = (e2 - 1.0) / 2.0;
        assert!((m[(1, 0)].re - expected).abs() < 1e-13 && (m[(1, 1)].re - expected).abs() < 1e-13);
        assert!((m[(0, 0)].re - 1.0).abs() < 1e-13);
        assert!((expected - 3.194_528_049_465_325).abs() < 1e-12);
    }

    #[test]
    fn log_mean_series_branch_is_continuous() {
        let a: f64 = 3.0;
        let b = a * (1.0 + 0.999e-5);
        let series = log_mean(a, b);
        // the direct quotient loses about eps / gap relative accuracy here
        let direct = (a - b) / (a.ln() - b.ln());
        assert!((series - direct).abs() < 1e-9 * a);
        assert!(series > a && series < b);
        assert_eq!(log_mean(2.0, 2.0), 2.0);
    }

    #[test]
    fn nu_average_edge_cases() {
        let (a, x, b) = triple(5, 3);
        let full = heinz_nu_average(&a, &x, &b, 0.0, 1.0).unwrap();
        let im = integral_mean(&a, &x, &b).unwrap();
        assert!(full.frobenius_distance(&im) < 1e-12 * im.frobenius_norm());

        let id = HpdMatrix::from_matrix(&ComplexMatrix::identity(3)).unwrap();
        let avg = heinz_nu_average(&id, &x, &id, 0.3, 0.55).unwrap();
        assert!(avg.frobenius_distance(&x.scale(0.25)) < 1e-13);

        assert_eq!(heinz_nu_average(&a, &x, &b, 0.6, 0.4).unwrap_err(), Error::BadInterval(0.6, 0.4));
    }

    #[test]
    fn dimension_mismatch() {
        let (a, _, b) = triple(6, 3);
        let x = ComplexMatrix::identity(2);
        assert_eq!(heinz(&a, &x, &b, 0.3).unwrap_err(), Error::DimMismatch(3, 2));
        assert!(heron(&a, &x, &b, 0.3).is_err());
        assert!(integral_mean(&a, &x, &b).is_err());
    }

    #[test]
    fn params_by_name() {
        let mut p = MeanParams::default();
        p.set("nu", 0.1).unwrap();
        assert_eq!(p.get("nu"), Some(0.1));
        assert!((p.r0() - 0.1).abs() < 1e-15);
        p.set("nu", 0.8).unwrap();
        assert!((p.r0() - 0.2).abs() < 1e-15);
        assert!(p.set("zeta", 1.0).is_err());
        assert!(p.set("t", f64::NAN).is_err());
    }
}
