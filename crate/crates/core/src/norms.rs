//! Singular-value norms and the Ky Fan dominance test.
//!
//! `|||L||| <= |||R|||` holds for every unitarily invariant norm iff it holds
//! for all Ky Fan k-norms, so the margins below stand in for "any unitarily
//! invariant norm".

use crate::error::{Error, Result};
use crate::linalg::{svd_values, ComplexMatrix};

/// Default relative tolerance for [`fan_dominates`].
pub const DEFAULT_FAN_TOL: f64 = 1e-9;

/// Schatten p-norm; `p = f64::INFINITY` gives the operator norm.
pub fn schatten(m: &ComplexMatrix, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::BadExponent(p));
    }
    let s = svd_values(m)?;
    let values = s.values();
    if p.is_infinite() {
        return Ok(values[0]);
    }
    if p == 1.0 {
        return Ok(values.iter().sum());
    }
    // scale by s_1 to keep s^p in range
    let top = values[0];
    if top == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = values.iter().map(|s| (s / top).powf(p)).sum();
    Ok(top * sum.powf(1.0 / p))
}

/// Sum of the `k` largest singular values.
pub fn ky_fan(m: &ComplexMatrix, k: usize) -> Result<f64> {
    let dim = m.dim();
    if k == 0 || k > dim {
        return Err(Error::BadOrder { k, dim });
    }
    Ok(svd_values(m)?.values()[..k].iter().sum())
}

/// All Ky Fan norms `k = 1..=dim` at once.
pub fn ky_fan_profile(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(svd_values(m)?.ky_fan_profile())
}

/// Entry `k-1` is `ky_fan(R, k) - ky_fan(L, k)`.
pub fn fan_margins(lhs: &ComplexMatrix, rhs: &ComplexMatrix) -> Result<Vec<f64>> {
    lhs.check_same_dim(rhs)?;
    let l = ky_fan_profile(lhs)?;
    let r = ky_fan_profile(rhs)?;
    Ok(r.iter().zip(&l).map(|(r, l)| r - l).collect())
}

/// True iff every Ky Fan margin is at least `-tol * (1 + ||R||_1)`.
pub fn fan_dominates(lhs: &ComplexMatrix, rhs: &ComplexMatrix, tol: f64) -> Result<bool> {
    lhs.check_same_dim(rhs)?;
    let l = ky_fan_profile(lhs)?;
    let r = ky_fan_profile(rhs)?;
    let trace_norm = *r.last().expect("non-empty profile");
    let floor = -tol * (1.0 + trace_norm);
    Ok(r.iter().zip(&l).all(|(r, l)| r - l >= floor))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_real_diag(v)
    }

    #[test]
    fn schatten_on_diagonal() {
        let m = diag(&[3.0, 1.0]);
        assert!((schatten(&m, 1.0).unwrap() - 4.0).abs() < 1e-14);
        assert!((schatten(&m, 2.0).unwrap() - 10f64.sqrt()).abs() < 1e-14);
        assert!((schatten(&ComplexMatrix::identity(3), f64::INFINITY).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(schatten(&ComplexMatrix::zeros(2), 3.0).unwrap(), 0.0);
    }

    #[test]
    fn schatten_rejects_small_exponent() {
        assert_eq!(schatten(&diag(&[1.0]), 0.5), Err(Error::BadExponent(0.5)));
        assert!(schatten(&diag(&[1.0]), f64::NAN).is_err());
    }

    #[test]
    fn ky_fan_orders() {
        let m = diag(&[3.0, 1.0]);
        assert!((ky_fan(&m, 1).unwrap() - 3.0).abs() < 1e-14);
        assert!((ky_fan(&m, 2).unwrap() - 4.0).abs() < 1e-14);
        assert_eq!(ky_fan(&ComplexMatrix::zeros(3), 2).unwrap(), 0.0);
        assert_eq!(ky_fan(&m, 0), Err(Error::BadOrder { k: 0, dim: 2 }));
        assert_eq!(ky_fan(&m, 3), Err(Error::BadOrder { k: 3, dim: 2 }));
    }

    #[test]
    fn margins_and_dominance() {
        let flat = diag(&[1.0, 1.0]);
        let peaked = diag(&[2.0, 0.0]);
        assert_eq!(fan_margins(&flat, &flat).unwrap(), vec![0.0, 0.0]);
        let m = fan_margins(&flat, &peaked).unwrap();
        assert!((m[0] - 1.0).abs() < 1e-14 && m[1].abs() < 1e-14);
        let m = fan_margins(&peaked, &flat).unwrap();
        assert!((m[0] + 1.0).abs() < 1e-14 && m[1].abs() < 1e-14);

        assert!(fan_dominates(&flat, &flat, 0.0).unwrap());
        assert!(fan_dominates(&flat, &peaked, 1e-12).unwrap());
        assert!(!fan_dominates(&peaked, &flat, 1e-12).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let err = fan_margins(&diag(&[1.0]), &diag(&[1.0, 2.0])).unwrap_err();
        assert_eq!(err, Error::DimMismatch(1, 2));
        assert!(fan_dominates(&diag(&[1.0]), &diag(&[1.0, 2.0]), 1e-9).is_err());
    }
}
