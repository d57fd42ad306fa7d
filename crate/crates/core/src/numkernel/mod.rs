//! Dense complex linear algebra used throughout the crate.
//!
//! Everything here works on small dense matrices (dimension up to a few hundred):
//! cyclic Jacobi for Hermitian eigenproblems, one-sided Jacobi SVD for ranks and
//! null spaces, LU with partial pivoting for solves, and the reduced resolvent
//! which evaluates boundary limits `eps -> 0+` in closed form.

mod basis;
mod eig;
pub(crate) mod matrix;
mod solve;
mod svd;
mod tolerance;

pub use basis::{orthogonalize_against, orthonormal_columns};
pub use eig::{
    hermitian_eig, reduced_resolvent, reduced_resolvent_norm, EigenCluster, HermitianEigenDecomposition,
};
pub use matrix::ComplexMatrix;
pub use solve::{inverse, solve_linear};
pub use svd::{
    inverse_condition, null_space, numerical_rank, orthogonal_complement, singular_values, spectral_norm, svd,
    Svd,
};
pub use tolerance::ToleranceProfile;

use num_complex::Complex64;

pub fn vector_norm(v: &[Complex64]) -> f64 {
    matrix::vec_norm(v)
}

/// Inner product `<a, b>`, conjugate-linear in `a`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    matrix::dot(a, b)
}
