//! Solutions of `A1 X - X A0 - X V X + V* = 0`.
//!
//! [`build_lambda`] validates a family of witnesses, [`build_x_lambda`] turns it into
//! `X_Λ = sum_j P_j* V* R(lambda_j)`, [`solve_existence`] selects witnesses on its own,
//! and [`oracle_graph_solutions`] enumerates graph subspaces by brute force.

mod existence;
mod lambda;
mod oracle;
mod solution;

pub use existence::{solve_existence, ExistenceOutcome, NoCertificate, NoCertificateReason, SelectionRoute, Solved};
pub use lambda::{build_lambda, LambdaPair, LambdaSet, ObliqueProjectionFamily};
pub use oracle::{oracle_graph_solutions, oracle_graph_solutions_basis, BasisOracle, GraphSolution};
pub use solution::{build_x_lambda, RiccatiSolution};

use num_complex::Complex64;

use crate::blockmodel::BlockOperator;
use crate::numkernel::{orthonormal_columns, spectral_norm, ComplexMatrix};
use crate::{Error, Result};

fn check_shape(op: &BlockOperator, x: &ComplexMatrix, context: &'static str) -> Result<()> {
    if x.rows() != op.n() || x.cols() != op.d0() {
        return Err(Error::DimensionMismatch {
            context,
            expected: format!("{}x{}", op.n(), op.d0()),
            got: format!("{}x{}", x.rows(), x.cols()),
        });
    }
    Ok(())
}

/// Left-hand side of the Riccati equation.
pub fn riccati_lhs(op: &BlockOperator, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_shape(op, x, "riccati_residual")?;
    let xa0 = x * op.a0();
    let xvx = &(x * op.v()) * x;
    Ok(&(&(&(op.a1() * x) - &xa0) - &xvx) + &op.v().adjoint())
}

/// Frobenius norm of `A1 X - X A0 - X V X + V*`.
pub fn riccati_residual(op: &BlockOperator, x: &ComplexMatrix) -> Result<f64> {
    Ok(riccati_lhs(op, x)?.frobenius_norm())
}

/// `(‖A0‖ + ‖A1‖ + ‖V‖)(1 + ‖X‖)^2` in spectral norms; the residual is judged relative
/// to it.
pub fn residual_scale(op: &BlockOperator, x: &ComplexMatrix) -> f64 {
    let blocks = spectral_norm(op.a0()) + spectral_norm(op.a1()) + spectral_norm(op.v());
    let xn = 1.0 + spectral_norm(x);
    blocks.max(f64::MIN_POSITIVE) * xn * xn
}

/// Orthonormal basis of the graph `{x ⊕ X x}` as a `(d0 + n) x d0` matrix.
pub fn graph_basis(x: &ComplexMatrix) -> ComplexMatrix {
    let d0 = x.cols();
    let mut g = ComplexMatrix::zeros(d0 + x.rows(), d0);
    g.set_block(0, 0, &ComplexMatrix::identity(d0));
    g.set_block(d0, 0, x);
    // the columns are independent, every singular value of [I; X] is at least 1
    orthonormal_columns(&g, 1e-3)
}

/// `‖(I - G) B G‖_2` for the orthogonal projection `G` onto the graph of `X`.
pub fn graph_invariance_defect(op: &BlockOperator, x: &ComplexMatrix) -> Result<f64> {
    check_shape(op, x, "graph_invariance_defect")?;
    let q = graph_basis(x);
    let bq = &op.assemble_full() * &q;
    let proj = &q * &(&q.adjoint() * &bq);
    Ok(spectral_norm(&(&bq - &proj)))
}

pub(crate) fn max_entry_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y): (&Complex64, &Complex64)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::scalar_fixture;

    #[test]
    fn residual_fixtures() {
        let op = scalar_fixture();
        let s2 = 2f64.sqrt();
        for root in [1.0 - s2, 1.0 + s2] {
            let x = ComplexMatrix::from_diagonal(&[root]);
            assert!(riccati_residual(&op, &x).unwrap() <= 1e-12);
        }
        let zero = ComplexMatrix::zeros(1, 1);
        assert!((riccati_residual(&op, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert!(riccati_residual(&op, &ComplexMatrix::zeros(2, 1)).is_err());
    }

    #[test]
    fn decoupled_zero_solution() {
        let op = BlockOperator::new(
            ComplexMatrix::from_diagonal(&[1.0, -3.0]),
            ComplexMatrix::from_diagonal(&[2.0]),
            ComplexMatrix::zeros(2, 1),
        )
        .unwrap();
        let x = ComplexMatrix::zeros(1, 2);
        assert_eq!(riccati_residual(&op, &x).unwrap(), 0.0);
        assert!(graph_invariance_defect(&op, &x).unwrap() < 1e-15);
    }

    #[test]
    fn graph_of_root_is_eigenline() {
        let op = scalar_fixture();
        let x = ComplexMatrix::from_diagonal(&[1.0 - 2f64.sqrt()]);
        assert!(graph_invariance_defect(&op, &x).unwrap() <= 1e-12);
        let bad = ComplexMatrix::from_diagonal(&[0.0]);
        assert!(graph_invariance_defect(&op, &bad).unwrap() > 0.5);
    }
}
