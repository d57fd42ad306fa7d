//! The block operator `B = [[A0, V], [V*, A1]]` and the cyclicity hypothesis.
//!
//! Coordinates `0..d0` belong to `H0` and `d0..d0+n` to `H1`; the inclusion
//! `J_{H1}` and the compression `P_{H1}` are these index ranges.

use num_complex::Complex64;

use crate::numkernel::{
    hermitian_eig, orthogonalize_against, ComplexMatrix, ToleranceProfile,
};
use crate::{Error, Result};

/// `B = [[A0, V], [V*, A1]]` with `A0` (`d0 x d0`) and `A1` (`n x n`) Hermitian and
/// `V: H1 -> H0` a `d0 x n` matrix.
#[derive(Debug, Clone)]
pub struct BlockOperator {
    a0: ComplexMatrix,
    a1: ComplexMatrix,
    v: ComplexMatrix,
}

impl BlockOperator {
    /// Validates shapes and Hermiticity with the default relative tolerance.
    pub fn new(a0: ComplexMatrix, a1: ComplexMatrix, v: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(a0, a1, v, &ToleranceProfile::default())
    }

    pub fn with_tolerance(
        a0: ComplexMatrix,
        a1: ComplexMatrix,
        v: ComplexMatrix,
        tol: &ToleranceProfile,
    ) -> Result<Self> {
        for (name, m) in [("a0", &a0), ("a1", &a1), ("v", &v)] {
            if m.is_empty() {
                return Err(Error::Empty { name: name.into() });
            }
            m.ensure_finite(name)?;
        }
        a0.ensure_hermitian("a0", tol.rank_rtol)?;
        a1.ensure_hermitian("a1", tol.rank_rtol)?;
        if v.rows() != a0.rows() || v.cols() != a1.rows() {
            return Err(Error::DimensionMismatch {
                context: "BlockOperator",
                expected: format!("v of shape {}x{}", a0.rows(), a1.rows()),
                got: format!("{}x{}", v.rows(), v.cols()),
            });
        }
        Ok(Self {
            a0: a0.hermitian_part(),
            a1: a1.hermitian_part(),
            v,
        })
    }

    pub fn a0(&self) -> &ComplexMatrix {
        &self.a0
    }

    pub fn a1(&self) -> &ComplexMatrix {
        &self.a1
    }

    pub fn v(&self) -> &ComplexMatrix {
        &self.v
    }

    /// `dim H0`.
    pub fn d0(&self) -> usize {
        self.a0.rows()
    }

    /// `dim H1`.
    pub fn n(&self) -> usize {
        self.a1.rows()
    }

    pub fn dim(&self) -> usize {
        self.d0() + self.n()
    }

    /// The full `(d0+n) x (d0+n)` matrix `[[A0, V], [V*, A1]]`.
    pub fn assemble_full(&self) -> ComplexMatrix {
        let d0 = self.d0();
        let mut b = ComplexMatrix::zeros(self.dim(), self.dim());
        b.set_block(0, 0, &self.a0);
        b.set_block(0, d0, &self.v);
        b.set_block(d0, 0, &self.v.adjoint());
        b.set_block(d0, d0, &self.a1);
        b
    }

    /// Columns of `J_{H1}`: the last `n` standard basis vectors of `H0 ⊕ H1`.
    pub fn h1_embedding(&self) -> ComplexMatrix {
        let mut j = ComplexMatrix::zeros(self.dim(), self.n());
        for i in 0..self.n() {
            j[(self.d0() + i, i)] = Complex64::new(1.0, 0.0);
        }
        j
    }

    /// Restriction to an `A0`-invariant subspace containing `Ran V`, given by an
    /// orthonormal basis `q` (`d0 x r`): `(Q* A0 Q, A1, Q* V)`.
    pub fn restrict(&self, q: &ComplexMatrix) -> Result<Self> {
        let qh = q.adjoint();
        let a0 = &(&qh * &self.a0) * q;
        let v = &qh * &self.v;
        Self::new(a0.hermitian_part(), self.a1.clone(), v)
    }
}

/// Result of checking the standing hypothesis on a [`BlockOperator`].
#[derive(Debug, Clone)]
pub struct HypothesisReport {
    pub hermitian_ok: bool,
    pub cyclic_ok: bool,
    /// `dim K0`, the dimension of the smallest `A0`-invariant subspace containing `Ran V`.
    pub krylov_rank: usize,
    /// Orthonormal basis of `K0` as columns (`d0 x krylov_rank`).
    pub krylov_basis: ComplexMatrix,
    pub n: usize,
    pub d0: usize,
    /// Smallest normalised residual of an accepted Krylov direction. Values close to the
    /// rank threshold flag a borderline decision.
    pub smallest_accepted: f64,
    /// Largest normalised residual among rejected directions (0 if none were rejected).
    pub largest_rejected: f64,
}

impl HypothesisReport {
    /// Ratio between the weakest accepted and the strongest rejected direction.
    /// Infinite when nothing was rejected.
    pub fn rank_gap(&self) -> f64 {
        if self.largest_rejected == 0.0 {
            f64::INFINITY
        } else {
            self.smallest_accepted / self.largest_rejected
        }
    }

    pub fn passed(&self) -> bool {
        self.hermitian_ok && self.cyclic_ok
    }
}

/// Orthonormal basis of a Krylov space together with rank diagnostics.
#[derive(Debug, Clone)]
pub struct KrylovSpace {
    pub basis: ComplexMatrix,
    pub smallest_accepted: f64,
    pub largest_rejected: f64,
}

/// Orthonormal basis of `span{A^k s : k >= 0, s a column of start}` by block Arnoldi
/// with full reorthogonalisation.
///
/// A new direction is kept when its residual exceeds `rank_rtol * max(‖A‖_F, ‖start‖_F)`.
/// Mathematically this is the column space of `[S, AS, A^2 S, ...]`; orthogonalising as
/// we go avoids the exploding condition number of raw matrix powers.
pub fn krylov_space(a: &ComplexMatrix, start: &ComplexMatrix, tol: &ToleranceProfile) -> KrylovSpace {
    let dim = a.rows();
    let scale = a.frobenius_norm().max(start.frobenius_norm());
    let threshold = tol.rank_rtol * scale;
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut smallest_accepted = f64::INFINITY;
    let mut largest_rejected: f64 = 0.0;

    let mut push = |basis: &mut Vec<Vec<Complex64>>, w: &[Complex64], frontier: &mut Vec<Vec<Complex64>>| {
        if basis.len() >= dim {
            return;
        }
        let (q, nrm) = orthogonalize_against(basis, w);
        let rel = if scale > 0.0 { nrm / scale } else { 0.0 };
        if nrm > threshold && scale > 0.0 {
            smallest_accepted = smallest_accepted.min(rel);
            basis.push(q.clone());
            frontier.push(q);
        } else {
            largest_rejected = largest_rejected.max(rel);
        }
    };

    let mut frontier = Vec::new();
    for col in start.columns() {
        push(&mut basis, &col, &mut frontier);
    }
    while !frontier.is_empty() && basis.len() < dim {
        let mut next = Vec::new();
        for q in &frontier {
            let w = a.apply(q);
            push(&mut basis, &w, &mut next);
        }
        frontier = next;
    }

    KrylovSpace {
        basis: ComplexMatrix::from_columns(dim, &basis),
        smallest_accepted: if smallest_accepted.is_finite() { smallest_accepted } else { 0.0 },
        largest_rejected,
    }
}

/// The raw Krylov matrix `[V, A0 V, ..., A0^{d0-1} V]`.
pub fn krylov_matrix(op: &BlockOperator) -> ComplexMatrix {
    let d0 = op.d0();
    let n = op.n();
    let mut out = ComplexMatrix::zeros(d0, d0 * n);
    let mut block = op.v().clone();
    for k in 0..d0 {
        out.set_block(0, k * n, &block);
        block = op.a0() * &block;
    }
    out
}

/// Checks Hermiticity of the blocks and whether `Ran V` is cyclic for `A0`.
pub fn check_hypothesis(op: &BlockOperator, tol: &ToleranceProfile) -> HypothesisReport {
    let hermitian_ok = op.a0().hermitian_defect() <= tol.rank_rtol && op.a1().hermitian_defect() <= tol.rank_rtol;
    let ks = krylov_space(op.a0(), op.v(), tol);
    let krylov_rank = ks.basis.cols();
    HypothesisReport {
        hermitian_ok,
        cyclic_ok: krylov_rank == op.d0(),
        krylov_rank,
        krylov_basis: ks.basis,
        n: op.n(),
        d0: op.d0(),
        smallest_accepted: ks.smallest_accepted,
        largest_rejected: ks.largest_rejected,
    }
}

/// Multiplicity of the spectrum of a Hermitian matrix; in finite dimensions the largest
/// eigenvalue multiplicity.
pub fn multiplicity_of_spectrum(m: &ComplexMatrix, tol: &ToleranceProfile) -> Result<usize> {
    Ok(hermitian_eig(m, tol)?.max_multiplicity(tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::numerical_rank;
    use crate::testing::example_3_3;

    fn t() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    fn real(rows: &[&[f64]]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(rows)
    }

    #[test]
    fn assemble_scalar() {
        let op = BlockOperator::new(real(&[&[1.0]]), real(&[&[0.0]]), real(&[&[1.0]])).unwrap();
        assert_eq!(op.assemble_full(), real(&[&[1.0, 1.0], &[1.0, 0.0]]));
    }

    #[test]
    fn assemble_example() {
        let b = example_3_3().assemble_full();
        let expect = real(&[
            &[1.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 1.0, 1.0],
            &[1.0, 1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
        ]);
        assert_eq!(b, expect);
    }

    #[test]
    fn assemble_decoupled_is_block_diagonal() {
        let op = BlockOperator::new(
            ComplexMatrix::from_diagonal(&[1.0, 2.0]),
            ComplexMatrix::from_diagonal(&[3.0]),
            ComplexMatrix::zeros(2, 1),
        )
        .unwrap();
        assert_eq!(op.assemble_full(), ComplexMatrix::from_diagonal(&[1.0, 2.0, 3.0]));
    }

    #[test]
    fn rejects_bad_shapes_and_non_hermitian() {
        let err = BlockOperator::new(real(&[&[1.0]]), real(&[&[0.0]]), real(&[&[1.0, 1.0]])).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        let err = BlockOperator::new(real(&[&[1.0, 2.0], &[0.0, 1.0]]), real(&[&[0.0]]), real(&[&[1.0], &[1.0]]))
            .unwrap_err();
        assert!(matches!(err, Error::NotHermitian { ref name, .. } if name == "a0"));
    }

    #[test]
    fn cyclicity_fixtures() {
        let rep = check_hypothesis(&example_3_3(), &t());
        assert!(rep.cyclic_ok && rep.hermitian_ok);
        assert_eq!(rep.krylov_rank, 2);

        let axis = BlockOperator::new(
            ComplexMatrix::from_diagonal(&[1.0, 2.0]),
            real(&[&[0.0]]),
            real(&[&[1.0], &[0.0]]),
        )
        .unwrap();
        let rep = check_hypothesis(&axis, &t());
        assert!(!rep.cyclic_ok);
        assert_eq!(rep.krylov_rank, 1);

        let diag = BlockOperator::new(
            ComplexMatrix::from_diagonal(&[1.0, 2.0]),
            real(&[&[0.0]]),
            real(&[&[1.0], &[1.0]]),
        )
        .unwrap();
        let rep = check_hypothesis(&diag, &t());
        assert!(rep.cyclic_ok);
        // determinant oracle for [[1, 1], [1, 2]]: 1*2 - 1*1 = 1 != 0
        let k = krylov_matrix(&diag);
        assert_eq!(k, real(&[&[1.0, 1.0], &[1.0, 2.0]]));
        assert_eq!(numerical_rank(&k, &t()), 2);
    }

    #[test]
    fn multiplicity_fixtures() {
        assert_eq!(multiplicity_of_spectrum(&ComplexMatrix::identity(3), &t()).unwrap(), 3);
        assert_eq!(
            multiplicity_of_spectrum(&ComplexMatrix::from_diagonal(&[1.0, 2.0, 3.0]), &t()).unwrap(),
            1
        );
        assert_eq!(multiplicity_of_spectrum(&example_3_3().assemble_full(), &t()).unwrap(), 1);
    }

    #[test]
    fn zero_coupling_has_trivial_krylov_space() {
        let op = BlockOperator::new(
            ComplexMatrix::from_diagonal(&[1.0, 2.0]),
            real(&[&[0.0]]),
            ComplexMatrix::zeros(2, 1),
        )
        .unwrap();
        let rep = check_hypothesis(&op, &t());
        assert_eq!(rep.krylov_rank, 0);
        assert!(!rep.cyclic_ok);
    }
}
