use super::matrix::{c64, ComplexMatrix};
use crate::error::{Error, Result};

/// Sweep limit for the cyclic Jacobi iteration.
pub const MAX_SWEEPS: usize = 60;
/// Stop once the off-diagonal Frobenius mass falls below this fraction of `||M||_F`.
const OFF_DIAGONAL_TOL: f64 = 1e-14;
/// Accepted relative asymmetry `||M - M*||_F / ||M||_F` for Hermitian inputs.
const HERMITIAN_TOL: f64 = 1e-12;

/// Eigendecomposition of a Hermitian matrix by the cyclic complex Jacobi method.
///
/// Returns eigenvalues in descending order (stable for ties) and a unitary
/// matrix whose columns are the matching eigenvectors, so that
/// `M = V diag(lambda) V*`.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let defect = m.hermitian_defect();
    if !(defect <= HERMITIAN_TOL) {
        return Err(Error::NotHermitian(defect));
    }
    let (values, vectors) = jacobi(&m.hermitian_part())?;
    Ok(sort_descending(values, vectors))
}

fn off_diagonal_norm(a: &[c64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = m.dim();
    let mut a = m.as_slice().to_vec();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm();

    let mut converged = false;
    for _sweep in 0..=MAX_SWEEPS {
        if off_diagonal_norm(&a, n) <= OFF_DIAGONAL_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, v.as_mut_slice(), n, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }
    let values = (0..n).map(|i| a[i * n + i].re).collect();
    Ok((values, v))
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
///
/// The unitary is `G = diag(1, e^{-i phi}) R` on the (p, q) plane, where the
/// phase makes the pivot real and `R` is the classical real rotation.
fn rotate(a: &mut [c64], v: &mut [c64], n: usize, p: usize, q: usize) {
    let g = a[p * n + q];
    let g_abs = g.norm();
    if g_abs == 0.0 {
        return;
    }
    let phase = g / g_abs;
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;

    let theta = (aqq - app) / (2.0 * g_abs);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + theta.hypot(1.0))
    };
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;

    let gqp = -phase.conj() * s;
    let gqq = phase.conj() * c;

    // columns: A <- A G
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * c + akq * gqp;
        a[k * n + q] = akp * s + akq * gqq;
    }
    // rows: A <- G* A
    let hpq = gqp.conj();
    let hqq = gqq.conj();
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = apk * c + aqk * hpq;
        a[q * n + k] = apk * s + aqk * hqq;
    }
    a[p * n + q] = c64::new(0.0, 0.0);
    a[q * n + p] = c64::new(0.0, 0.0);
    a[p * n + p] = c64::new(app - t * g_abs, 0.0);
    a[q * n + q] = c64::new(aqq + t * g_abs, 0.0);

    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * c + vkq * gqp;
        v[k * n + q] = vkp * s + vkq * gqq;
    }
}

fn sort_descending(values: Vec<f64>, vectors: ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let sorted = order.iter().map(|&i| values[i]).collect();
    let permuted = ComplexMatrix::from_fn(n, |row, col| vectors[(row, order[col])]);
    (sorted, permuted)
}

/// Singular values `s_1 >= ... >= s_n >= 0` of a square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.iter_mut().for_each(|v| *v = v.max(0.0));
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Partial sums `sum_{j<=k} s_j` for `k = 1..=n`.
    pub fn ky_fan_profile(&self) -> Vec<f64> {
        self.values
            .iter()
            .scan(0.0, |acc, &s| {
                *acc += s;
                Some(*acc)
            })
            .collect()
    }
}

/// Singular values of `m`, the square roots of the eigenvalues of `M*M`.
///
/// They are read off the Hermitian dilation `[[0, M], [M*, 0]]`, whose
/// spectrum is `{+s_j, -s_j}`; this keeps absolute accuracy of order
/// `eps * ||M||` even for tiny singular values, which squaring loses.
pub fn svd_values(m: &ComplexMatrix) -> Result<SingularSpectrum> {
    let n = m.dim();
    let mut dilation = ComplexMatrix::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            dilation[(i, n + j)] = z;
            dilation[(n + j, i)] = z.conj();
        }
    }
    let (values, _) = jacobi(&dilation)?;
    let mut values = values;
    values.sort_by(|a, b| b.total_cmp(a));
    values.truncate(n);
    Ok(SingularSpectrum::new(values))
}
