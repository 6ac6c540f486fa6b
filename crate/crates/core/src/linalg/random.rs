//! Reproducible random instances.
//!
//! Every random object is drawn from a ChaCha stream whose seed is derived
//! from a master seed and a path of counters, so the draw for sample `i`
//! never depends on how many other samples ran before it or on which
//! thread ran it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::hpd::HpdMatrix;
use super::matrix::{c64, ComplexMatrix};

/// A 64-bit stream identifier with counter-based child derivation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct StreamSeed(pub u64);

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl StreamSeed {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    /// Child stream for counter `index`.
    pub fn child(self, index: u64) -> Self {
        Self(splitmix64(self.0 ^ splitmix64(index.wrapping_add(0x632B_E59B_D9B4_E019))))
    }

    /// Child stream keyed by a label (FNV-1a, stable across platforms).
    pub fn child_str(self, label: &str) -> Self {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in label.bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01B3);
        }
        self.child(h)
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

/// Standard complex Gaussian entry: `E|z|^2 = 1`.
fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> c64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_complex<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| complex_gaussian(rng))
}

/// Orthonormalizes the columns of `m` by modified Gram-Schmidt, run twice.
///
/// Returns `None` if a column is numerically dependent on the previous ones.
pub fn orthonormalize_columns(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = m.dim();
    let mut cols: Vec<Vec<c64>> = (0..n).map(|j| (0..n).map(|i| m[(i, j)]).collect()).collect();
    for j in 0..n {
        let original: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for _pass in 0..2 {
            for k in 0..j {
                let proj: c64 = cols[k]
                    .iter()
                    .zip(&cols[j])
                    .map(|(q, v)| q.conj() * v)
                    .sum();
                let (done, rest) = cols.split_at_mut(j);
                for (v, q) in rest[0].iter_mut().zip(&done[k]) {
                    *v -= proj * q;
                }
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 1e-8 * original) {
            return None;
        }
        cols[j].iter_mut().for_each(|z| *z /= norm);
    }
    Some(ComplexMatrix::from_fn(n, |i, j| cols[j][i]))
}

/// Haar-distributed unitary from the QR of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        if let Some(q) = orthonormalize_columns(&random_complex(dim, rng)) {
            return q;
        }
    }
}

/// Random HPD matrix with eigenvalues log-uniform in `[lo, hi]`.
pub fn random_hpd<R: Rng + ?Sized>(dim: usize, rng: &mut R, range: (f64, f64)) -> HpdMatrix {
    let (lo, hi) = range;
    assert!(dim >= 1, "dimension must be positive");
    assert!(lo > 0.0 && lo <= hi, "eigenvalue range must satisfy 0 < lo <= hi");
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    let eigenvalues: Vec<f64> = (0..dim)
        .map(|_| {
            if lo == hi {
                lo
            } else {
                let u: f64 = rng.random();
                (ln_lo + u * (ln_hi - ln_lo)).exp().clamp(lo, hi)
            }
        })
        .collect();
    let frame = random_unitary(dim, rng);
    HpdMatrix::from_spectrum(eigenvalues, frame)
}
