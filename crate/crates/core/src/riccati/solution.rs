use crate::blockmodel::BlockOperator;
use crate::numkernel::{hermitian_eig, reduced_resolvent, spectral_norm, ComplexMatrix, ToleranceProfile};
use crate::Result;

use super::{graph_invariance_defect, residual_scale, riccati_residual, LambdaSet};

/// A bounded solution `X: H0 -> H1` (an `n x d0` matrix) with its diagnostics.
#[derive(Debug, Clone)]
pub struct RiccatiSolution {
    pub x: ComplexMatrix,
    /// Witnesses `X` was built from, when it came from [`build_x_lambda`].
    pub lambda_set: Option<LambdaSet>,
    /// Frobenius norm of the left-hand side of the equation.
    pub residual: f64,
    /// `‖(I - G) B G‖_2` for the projection `G` onto the graph.
    pub graph_defect: f64,
    /// `(‖A0‖ + ‖A1‖ + ‖V‖)(1 + ‖X‖)^2`.
    pub residual_scale: f64,
    /// `‖B‖_2`.
    pub operator_norm: f64,
    /// Always true for matrices.
    pub bounded: bool,
}

impl RiccatiSolution {
    /// Evaluates residual and graph defect of `x` for `op`.
    pub fn evaluate(op: &BlockOperator, x: ComplexMatrix, lambda_set: Option<LambdaSet>) -> Result<Self> {
        let residual = riccati_residual(op, &x)?;
        let graph_defect = graph_invariance_defect(op, &x)?;
        Ok(Self {
            residual_scale: residual_scale(op, &x),
            operator_norm: spectral_norm(&op.assemble_full()),
            x,
            lambda_set,
            residual,
            graph_defect,
            bounded: true,
        })
    }

    pub fn residual_ok(&self, tol: &ToleranceProfile) -> bool {
        self.residual <= tol.residual_tol * self.residual_scale
    }

    pub fn graph_ok(&self, tol: &ToleranceProfile) -> bool {
        self.graph_defect <= tol.residual_tol * self.operator_norm.max(f64::MIN_POSITIVE)
    }

    pub fn verified(&self, tol: &ToleranceProfile) -> bool {
        self.residual_ok(tol) && self.graph_ok(tol)
    }
}

/// `X_Λ = sum_j P_j* V* R(lambda_j)` with `R` the reduced resolvent of `A0`.
///
/// The graph of `X_Λ` is the span of the eigenvectors of `B` not associated with Λ; the
/// Λ eigenvectors span its orthogonal complement, the graph of `-X_Λ*` over `H1`.
pub fn build_x_lambda(op: &BlockOperator, lambda: &LambdaSet, tol: &ToleranceProfile) -> Result<RiccatiSolution> {
    let a0_eig = hermitian_eig(op.a0(), tol)?;
    let family = lambda.projections(tol)?;
    let vh = op.v().adjoint();
    let mut x = ComplexMatrix::zeros(op.n(), op.d0());
    for (p, pair) in family.projections.iter().zip(lambda.pairs()) {
        let r = reduced_resolvent(&a0_eig, pair.lambda, tol);
        x = &x + &(&(&p.adjoint() * &vh) * &r);
    }
    RiccatiSolution::evaluate(op, x, Some(lambda.clone()))
}
