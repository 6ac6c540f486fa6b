//! Heinz and Heron operator means, hyperbolic kernel calculus on the
//! operator `D = L_{X1} - R_{Y1}`, unitarily invariant norms, and a
//! randomized verifier for the norm inequalities relating them.

// `!(x > y)` comparisons are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dmap;
pub mod error;
pub mod inequalities;
pub mod linalg;
pub mod means;
pub mod norms;
pub mod cli;

pub use error::{Error, Result};
pub use linalg::{c64, ComplexMatrix, HpdMatrix, SingularSpectrum, StreamSeed};
