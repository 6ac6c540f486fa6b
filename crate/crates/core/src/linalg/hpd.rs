use super::eigen::hermitian_eig;
use super::matrix::{c64, ComplexMatrix};
use crate::error::{Error, Result};

/// Hermitian positive-definite matrix together with its eigendecomposition.
///
/// Every spectral function (powers included, `A^1` too) is evaluated from
/// the cached decomposition, so all quantities derived from one instance
/// refer to exactly the same operator.
#[derive(Debug, Clone, PartialEq)]
pub struct HpdMatrix {
    base: ComplexMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
    log_eigenvalues: Vec<f64>,
}

impl HpdMatrix {
    /// Decomposes `m`, which must be Hermitian with a positive spectrum.
    pub fn from_matrix(m: &ComplexMatrix) -> Result<Self> {
        let (eigenvalues, eigenvectors) = hermitian_eig(m)?;
        let min = eigenvalues.last().copied().unwrap_or(0.0);
        if !(min > 0.0) {
            return Err(Error::NotPositiveDefinite(min));
        }
        let log_eigenvalues = eigenvalues.iter().map(|l| l.ln()).collect();
        Ok(Self {
            base: m.hermitian_part(),
            eigenvalues,
            eigenvectors,
            log_eigenvalues,
        })
    }

    /// Assembles `V diag(lambda) V*` from a positive spectrum and a unitary frame.
    pub fn from_spectrum(eigenvalues: Vec<f64>, frame: ComplexMatrix) -> Self {
        assert_eq!(eigenvalues.len(), frame.dim(), "spectrum/frame size mismatch");
        assert!(
            eigenvalues.iter().all(|&l| l > 0.0 && l.is_finite()),
            "eigenvalues must be positive and finite"
        );
        let n = eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eigenvalues[j].total_cmp(&eigenvalues[i]));
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eigenvalues[i]).collect();
        let eigenvectors = ComplexMatrix::from_fn(n, |r, c| frame[(r, order[c])]);
        let base = spectral(&eigenvectors, &eigenvalues).hermitian_part();
        let log_eigenvalues = eigenvalues.iter().map(|l| l.ln()).collect();
        Self {
            base,
            eigenvalues,
            eigenvectors,
            log_eigenvalues,
        }
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn base(&self) -> &ComplexMatrix {
        &self.base
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    /// `ln(lambda_i)`; half of these is the spectrum of the logarithm `X_1` with `A = e^{2 X_1}`.
    pub fn log_eigenvalues(&self) -> &[f64] {
        &self.log_eigenvalues
    }

    pub fn power(&self, t: f64) -> ComplexMatrix {
        hpd_power(self, t)
    }

    /// `f(A) = V diag(f(lambda)) V*` for a real scalar function.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let mapped: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        spectral(&self.eigenvectors, &mapped)
    }
}

fn spectral(v: &ComplexMatrix, diag: &[f64]) -> ComplexMatrix {
    let n = v.dim();
    let scaled = ComplexMatrix::from_fn(n, |i, j| v[(i, j)] * diag[j]);
    let mut out = &scaled * &v.adjoint();
    for i in 0..n {
        out[(i, i)] = c64::new(out[(i, i)].re, 0.0);
    }
    out
}

/// `H^t = V diag(lambda^t) V*`.
pub fn hpd_power(h: &HpdMatrix, t: f64) -> ComplexMatrix {
    if t == 0.0 {
        return ComplexMatrix::identity(h.dim());
    }
    h.apply(|l| l.powf(t))
}
