//! Dense kernels: symmetric eigendecomposition, Householder least squares,
//! Cholesky and the Cholesky-reduced generalized symmetric eigenproblem.
//!
//! Everything here is deterministic: fixed loop orders, no threading, and a
//! fixed eigenvector sign convention, so identical inputs give identical bits.

mod chol;
mod eigen;
mod mat;
mod qr;

pub use chol::{cholesky, cholesky_solve, logdet_spd, Cholesky};
pub use eigen::{gen_sym_eig, jacobi_eig, sym_eig, EigenDecomposition};
pub use mat::Mat;
pub use qr::{lstsq, Qr};

pub(crate) fn hypot(a: f64, b: f64) -> f64 {
    libm::hypot(a, b)
}
