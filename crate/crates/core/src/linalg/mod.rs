//! Dense complex linear algebra: matrices, the Hermitian Jacobi eigensolver,
//! singular values, HPD spectral calculus and random instance generation.

mod eigen;
mod hpd;
mod matrix;
pub mod random;

pub use eigen::{hermitian_eig, svd_values, SingularSpectrum, MAX_SWEEPS};
pub use hpd::{hpd_power, HpdMatrix};
pub use matrix::{c64, ComplexMatrix};
pub use random::{random_complex, random_hpd, random_unitary, StreamSeed};
