//! Spectral analysis of self-adjoint block operator matrices
//!
//! ```text
//!     B = [ A0   V  ]
//!         [ V*   A1 ]
//! ```
//!
//! with finite-dimensional blocks, and construction of bounded solutions of the
//! operator Riccati equation `A1 X - X A0 - X V X + V* = 0`.
//!
//! The crate is organised bottom-up:
//!
//! * [`numkernel`]: dense complex matrices, Hermitian Jacobi eigensolver, Jacobi SVD,
//!   LU solves and the reduced resolvent used for all `eps -> 0+` limits.
//! * [`blockmodel`]: the block operator, its assembly and the cyclicity hypothesis.
//! * [`herglotz`]: the compressed resolvent `M(z)`, its trace, the atoms of the trace
//!   measure and boundary-value scans.
//! * [`eigclassify`]: the three-way classification of eigenvalues of `B`.
//! * [`riccati`]: witness sets, oblique projections, `X_Lambda`, verification and the
//!   existence search, plus a brute-force invariant-subspace oracle.

pub mod blockmodel;
pub mod eigclassify;
mod error;
pub mod herglotz;
pub mod numkernel;
pub mod riccati;
pub mod testing;

pub use error::{Error, Result};
pub use num_complex::Complex64;
