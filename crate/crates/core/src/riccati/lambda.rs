use num_complex::Complex64;

use crate::blockmodel::BlockOperator;
use crate::eigclassify::witness_check;
use crate::numkernel::{
    hermitian_eig, inverse, numerical_rank, vector_norm, ComplexMatrix, HermitianEigenDecomposition, ToleranceProfile,
};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaPair {
    pub y: Vec<Complex64>,
    pub lambda: f64,
}

impl LambdaPair {
    pub fn new(y: Vec<Complex64>, lambda: f64) -> Self {
        Self { y, lambda }
    }
}

/// `n` witnesses `(y_k, lambda_k)` with linearly independent `y_k`.
#[derive(Debug, Clone)]
pub struct LambdaSet {
    pairs: Vec<LambdaPair>,
    y: ComplexMatrix,
}

impl LambdaSet {
    pub fn pairs(&self) -> &[LambdaPair] {
        &self.pairs
    }

    /// `n x n` matrix with columns `y_k`.
    pub fn y_matrix(&self) -> &ComplexMatrix {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.lambda).collect()
    }

    /// Whether every pair carries the same eigenvalue (within `tol`).
    pub fn single_lambda(&self, tol: f64) -> Option<f64> {
        let first = self.pairs.first()?.lambda;
        self.pairs.iter().all(|p| (p.lambda - first).abs() <= tol).then_some(first)
    }

    pub fn projections(&self, tol: &ToleranceProfile) -> Result<ObliqueProjectionFamily> {
        ObliqueProjectionFamily::new(&self.y, tol)
    }
}

/// Validates `n` witnesses for `op`.
///
/// Every `y` is rescaled to unit length. Each pair must satisfy
/// `(A1 - lambda) y = V* R(lambda) V y` together with `E_{A0}({lambda}) V y = 0`, and the
/// `y_k` must be independent; repeated pairs fail the latter.
pub fn build_lambda(op: &BlockOperator, pairs: &[LambdaPair], tol: &ToleranceProfile) -> Result<LambdaSet> {
    let a0_eig = hermitian_eig(op.a0(), tol)?;
    build_lambda_with(op, &a0_eig, pairs, tol)
}

pub(crate) fn build_lambda_with(
    op: &BlockOperator,
    a0_eig: &HermitianEigenDecomposition,
    pairs: &[LambdaPair],
    tol: &ToleranceProfile,
) -> Result<LambdaSet> {
    let n = op.n();
    if pairs.len() != n {
        return Err(Error::WrongPairCount {
            expected: n,
            got: pairs.len(),
        });
    }
    let mut normalized = Vec::with_capacity(n);
    for (k, p) in pairs.iter().enumerate() {
        if p.y.len() != n {
            return Err(Error::DimensionMismatch {
                context: "build_lambda",
                expected: format!("witness of length {n}"),
                got: format!("pair {k} of length {}", p.y.len()),
            });
        }
        if !p.lambda.is_finite() || p.y.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite {
                name: format!("pair {k}"),
            });
        }
        let nrm = vector_norm(&p.y);
        if nrm == 0.0 {
            return Err(Error::DependentWitnesses { rank: 0, n });
        }
        normalized.push(LambdaPair::new(p.y.iter().map(|c| c / nrm).collect(), p.lambda));
    }
    let y = ComplexMatrix::from_columns(n, &normalized.iter().map(|p| p.y.clone()).collect::<Vec<_>>());
    let rank = numerical_rank(&y, tol);
    if rank < n {
        return Err(Error::DependentWitnesses { rank, n });
    }
    for (index, p) in normalized.iter().enumerate() {
        let check = witness_check(op, a0_eig, p.lambda, &p.y, None, tol);
        if !check.passed() {
            let (residual, bound) = check.worst();
            return Err(Error::CaseEquationFailed {
                index,
                lambda: p.lambda,
                residual,
                bound,
            });
        }
    }
    Ok(LambdaSet { pairs: normalized, y })
}

/// The idempotents `P_k = Y E_kk Y^{-1}`: range `span{y_k}`, kernel `span{y_j : j != k}`.
#[derive(Debug, Clone)]
pub struct ObliqueProjectionFamily {
    pub projections: Vec<ComplexMatrix>,
}

impl ObliqueProjectionFamily {
    pub fn new(y: &ComplexMatrix, tol: &ToleranceProfile) -> Result<Self> {
        let y_inv = inverse(y, tol)?;
        let n = y.cols();
        let projections = (0..n)
            .map(|k| {
                let col = ComplexMatrix::column_vector(&y.column(k));
                let row = y_inv.submatrix(k, 0, 1, n);
                &col * &row
            })
            .collect();
        Ok(Self { projections })
    }

    pub fn len(&self) -> usize {
        self.projections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projections.is_empty()
    }

    /// `max_{k,j} ‖P_k P_j - δ_kj P_k‖_F`.
    pub fn algebra_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, pk) in self.projections.iter().enumerate() {
            for (j, pj) in self.projections.iter().enumerate() {
                let prod = pk * pj;
                let d = if k == j { (&prod - pk).frobenius_norm() } else { prod.frobenius_norm() };
                worst = worst.max(d);
            }
        }
        worst
    }

    /// `‖sum_k P_k - I‖_F`.
    pub fn resolution_defect(&self) -> f64 {
        let Some(first) = self.projections.first() else {
            return 0.0;
        };
        let mut sum = ComplexMatrix::zeros(first.rows(), first.cols());
        for p in &self.projections {
            sum = &sum + p;
        }
        (&sum - &ComplexMatrix::identity(first.rows())).frobenius_norm()
    }
}
