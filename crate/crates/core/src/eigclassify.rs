//! Three-way classification of the eigenvalues of `B`.
//!
//! Every eigenvector `(y0, y)` of `B` for `lambda` satisfies
//! `(A0 - lambda) y0 = -V y` and `(A1 - lambda) y = -V* y0`. Writing `R(lambda)` for the
//! reduced resolvent of `A0` and `E` for the eigenprojection of `A0` at `lambda`, this
//! gives `y0 = -R V y + x` with `x = E y0`, and hence
//!
//! ```text
//! (A1 - lambda) y = V* R(lambda) V y - V* x.
//! ```
//!
//! * `CaseI`: `lambda` is not an eigenvalue of `A0` (so `x = 0`);
//! * `CaseII`: `lambda` is an eigenvalue of `A0` but `x = 0`;
//! * `CaseIII`: `lambda` is an eigenvalue of `A0` and `x != 0`.
//!
//! Witnesses of the first two cases are exactly the pairs usable for building
//! solutions of the Riccati equation.

use num_complex::Complex64;

use crate::blockmodel::{check_hypothesis, BlockOperator};
use crate::numkernel::{
    hermitian_eig, null_space, orthogonal_complement, reduced_resolvent, reduced_resolvent_norm, vector_norm,
    ComplexMatrix, HermitianEigenDecomposition, ToleranceProfile,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    CaseI,
    CaseII,
    CaseIII,
}

impl CaseTag {
    pub fn label(self) -> &'static str {
        match self {
            CaseTag::CaseI => "CASE_I",
            CaseTag::CaseII => "CASE_II",
            CaseTag::CaseIII => "CASE_III",
        }
    }

    /// Whether the witness satisfies the limit equation without the `V* x` correction.
    pub fn is_regular(self) -> bool {
        !matches!(self, CaseTag::CaseIII)
    }
}

#[derive(Debug, Clone)]
pub struct Witness {
    /// Unit vector in `H1`, first non-negligible coordinate real positive.
    pub y: Vec<Complex64>,
    pub tag: CaseTag,
    /// Eigenvector component `x = E_{A0}({lambda}) y0`, present for `CaseIII`.
    pub x: Option<Vec<Complex64>>,
    pub in_k_pp: bool,
    /// Residual of the case equation the witness was verified against.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct EigenvalueClassification {
    pub lambda: f64,
    pub multiplicity: usize,
    /// `lambda` lies within the clustering radius of an eigenvalue of `A0`.
    pub in_spec_a0: bool,
    pub witnesses: Vec<Witness>,
}

impl EigenvalueClassification {
    pub fn has_case_iii(&self) -> bool {
        self.witnesses.iter().any(|w| w.tag == CaseTag::CaseIII)
    }
}

/// A pair `(lambda, y)` eligible for a witness set.
#[derive(Debug, Clone)]
pub struct KppPair {
    pub lambda: f64,
    pub y: Vec<Complex64>,
}

/// Residual of the witness equation together with the bound it is compared against.
#[derive(Debug, Clone, Copy)]
pub struct WitnessCheck {
    /// `‖(A1 - lambda) y - V* R V y + V* x‖`.
    pub residual: f64,
    /// `‖E_{A0}({lambda}) V y‖`; zero exactly when `V y ∈ Ran(A0 - lambda)`.
    pub range_defect: f64,
    pub bound: f64,
    pub range_bound: f64,
}

impl WitnessCheck {
    pub fn passed(&self) -> bool {
        self.residual <= self.bound && self.range_defect <= self.range_bound
    }

    /// The failing (or, if both pass, the residual) measurement with its bound.
    pub fn worst(&self) -> (f64, f64) {
        if self.residual <= self.bound && self.range_defect > self.range_bound {
            (self.range_defect, self.range_bound)
        } else {
            (self.residual, self.bound)
        }
    }
}

/// Evaluates the witness equation for `(lambda, y)` and optional `x`.
pub fn witness_check(
    op: &BlockOperator,
    a0_eig: &HermitianEigenDecomposition,
    lambda: f64,
    y: &[Complex64],
    x: Option<&[Complex64]>,
    tol: &ToleranceProfile,
) -> WitnessCheck {
    let r = reduced_resolvent(a0_eig, lambda, tol);
    let vy = op.v().apply(y);
    let vh = op.v().adjoint();
    let lhs = op.a1().shifted(Complex64::new(lambda, 0.0)).apply(y);
    let rhs = vh.apply(&r.apply(&vy));
    let mut diff: Vec<Complex64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    let mut x_norm = 0.0;
    if let Some(x) = x {
        for (d, vx) in diff.iter_mut().zip(vh.apply(x)) {
            *d += vx;
        }
        x_norm = vector_norm(x);
    }
    let ey = a0_eig.eigenprojection(lambda, tol).apply(&vy);

    let v_norm = op.v().frobenius_norm();
    let y_norm = vector_norm(y);
    let blocks = 1.0 + op.a0().frobenius_norm() + op.a1().frobenius_norm() + v_norm + lambda.abs();
    let scale = (blocks + v_norm * v_norm * reduced_resolvent_norm(a0_eig, lambda, tol)) * y_norm + v_norm * x_norm;
    WitnessCheck {
        residual: vector_norm(&diff),
        range_defect: vector_norm(&ey),
        bound: tol.residual_tol * scale,
        range_bound: tol.residual_tol * (1.0 + op.a0().frobenius_norm() + v_norm) * y_norm,
    }
}

/// Full eigenvector `y0 ⊕ y` rebuilt from a witness: `y0 = -R(lambda) V y + x`.
pub fn reconstruct_eigenvector(
    op: &BlockOperator,
    a0_eig: &HermitianEigenDecomposition,
    lambda: f64,
    y: &[Complex64],
    x: Option<&[Complex64]>,
    tol: &ToleranceProfile,
) -> Vec<Complex64> {
    let r = reduced_resolvent(a0_eig, lambda, tol);
    let mut y0: Vec<Complex64> = r.apply(&op.v().apply(y)).into_iter().map(|v| -v).collect();
    if let Some(x) = x {
        for (a, b) in y0.iter_mut().zip(x) {
            *a += b;
        }
    }
    y0.extend_from_slice(y);
    y0
}

/// Scale factor making `y` unit length with its first non-negligible coordinate real
/// positive.
fn canonical_scale(y: &[Complex64]) -> Complex64 {
    let nrm = vector_norm(y);
    let pivot = y
        .iter()
        .find(|c| c.norm() > 1e-8 * nrm)
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0));
    pivot.conj() / (pivot.norm() * nrm)
}

/// Classifies every eigenvalue cluster of `B`. Requires `Ran V` to be cyclic for `A0`;
/// otherwise eigenvectors of `A0` orthogonal to the Krylov space have no `H1` witness.
pub fn classify_all(op: &BlockOperator, tol: &ToleranceProfile) -> Result<Vec<EigenvalueClassification>> {
    let hyp = check_hypothesis(op, tol);
    if !hyp.cyclic_ok {
        return Err(Error::NotCyclic {
            krylov_rank: hyp.krylov_rank,
            d0: hyp.d0,
        });
    }
    let b = op.assemble_full();
    let b_eig = hermitian_eig(&b, tol)?;
    let a0_eig = hermitian_eig(op.a0(), tol)?;
    let d0 = op.d0();
    let n = op.n();
    // singular values of E W0 below this count as zero (W has orthonormal columns)
    let split_tol = tol.residual_tol * b.frobenius_norm().max(1.0);

    let mut out = Vec::new();
    for cl in b_eig.clusters(tol) {
        let lambda = cl.value;
        let k = cl.multiplicity();
        let w = b_eig.cluster_vectors(&cl);
        let w0 = w.submatrix(0, 0, d0, k);
        let w1 = w.submatrix(d0, 0, n, k);
        let in_spec_a0 = a0_eig.contains(lambda, tol);

        let groups: Vec<(CaseTag, ComplexMatrix)> = if !in_spec_a0 {
            vec![(CaseTag::CaseI, ComplexMatrix::identity(k))]
        } else {
            let e = a0_eig.eigenprojection(lambda, tol);
            let regular = null_space(&(&e * &w0), split_tol);
            let irregular = orthogonal_complement(&regular, k);
            vec![(CaseTag::CaseII, regular), (CaseTag::CaseIII, irregular)]
        };

        let e = a0_eig.eigenprojection(lambda, tol);
        let mut witnesses = Vec::with_capacity(k);
        for (tag, coeffs) in groups {
            for c in coeffs.columns() {
                let y_raw = w1.apply(&c);
                let y0_raw = w0.apply(&c);
                let s = canonical_scale(&y_raw);
                let y: Vec<Complex64> = y_raw.iter().map(|v| v * s).collect();
                let x = (tag == CaseTag::CaseIII).then(|| {
                    let y0: Vec<Complex64> = y0_raw.iter().map(|v| v * s).collect();
                    e.apply(&y0)
                });
                let check = witness_check(op, &a0_eig, lambda, &y, x.as_deref(), tol);
                if !check.passed() {
                    let (residual, bound) = check.worst();
                    return Err(Error::ClassificationResidual { lambda, residual, bound });
                }
                witnesses.push(Witness {
                    y,
                    tag,
                    x,
                    in_k_pp: tag.is_regular(),
                    residual: check.residual,
                });
            }
        }
        out.push(EigenvalueClassification {
            lambda,
            multiplicity: k,
            in_spec_a0,
            witnesses,
        });
    }
    Ok(out)
}

/// All `(lambda, y)` with a regular witness: the finite-dimensional `K_pp` pairs.
///
/// In finite dimensions `sum_i |<v_i, V y>|^2 / (mu_i - lambda)^2` is finite exactly
/// when `E_{A0}({lambda}) V y = 0`, which every witness satisfies, so membership
/// reduces to the case tag.
pub fn k_pp_members(classifications: &[EigenvalueClassification]) -> Vec<KppPair> {
    classifications
        .iter()
        .flat_map(|c| {
            c.witnesses.iter().filter(|w| w.in_k_pp).map(move |w| KppPair {
                lambda: c.lambda,
                y: w.y.clone(),
            })
        })
        .collect()
}

/// Pairs whose `K_pp` integral diverges. Structurally empty for matrices; kept for
/// symmetry with [`k_pp_members`].
pub fn k_sc_members(_classifications: &[EigenvalueClassification]) -> Vec<KppPair> {
    Vec::new()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{example_3_3, scalar_fixture};

    fn t() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    fn close(a: &[Complex64], b: &[f64], eps: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, &y)| (x - Complex64::new(y, 0.0)).norm() <= eps)
    }

    #[test]
    fn example_case_iii_witness() {
        let cls = classify_all(&example_3_3(), &t()).unwrap();
        assert_eq!(cls.len(), 4);
        let one = cls.iter().find(|c| (c.lambda - 1.0).abs() < 1e-8).unwrap();
        assert_eq!(one.multiplicity, 1);
        let w = &one.witnesses[0];
        assert_eq!(w.tag, CaseTag::CaseIII);
        assert!(!w.in_k_pp);
        assert!(close(&w.y, &[0.0, 1.0], 1e-12));
        assert!(close(w.x.as_ref().unwrap(), &[-1.0, 0.0], 1e-12));
        let others: Vec<_> = cls.iter().filter(|c| (c.lambda - 1.0).abs() >= 1e-8).collect();
        assert_eq!(others.len(), 3);
        assert!(others.iter().all(|c| c.witnesses.iter().all(|w| w.tag == CaseTag::CaseI)));
        assert_eq!(k_pp_members(&cls).len(), 3);
        assert!(k_sc_members(&cls).is_empty());
    }

    #[test]
    fn scalar_fixture_is_all_case_i() {
        let cls = classify_all(&scalar_fixture(), &t()).unwrap();
        let s2 = 2f64.sqrt();
        assert_eq!(cls.len(), 2);
        assert!((cls[0].lambda + s2).abs() < 1e-14);
        assert!((cls[1].lambda - s2).abs() < 1e-14);
        for c in &cls {
            assert_eq!(c.witnesses[0].tag, CaseTag::CaseI);
            // (1 - lambda) y = y / (-1 - lambda)
            let lhs = 1.0 - c.lambda;
            let rhs = 1.0 / (-1.0 - c.lambda);
            assert!((lhs - rhs).abs() < 1e-14);
        }
        assert_eq!(k_pp_members(&cls).len(), 2);
    }

    #[test]
    fn non_cyclic_is_rejected() {
        let op = BlockOperator::new(
            ComplexMatrix::from_diagonal(&[1.0, 2.0]),
            ComplexMatrix::from_diagonal(&[0.0]),
            ComplexMatrix::from_real_rows(&[&[1.0], &[0.0]]),
        )
        .unwrap();
        assert!(matches!(classify_all(&op, &t()), Err(Error::NotCyclic { krylov_rank: 1, d0: 2 })));
    }

    #[test]
    fn case_ii_when_eigenvector_avoids_the_shared_eigenspace() {
        // (0, 1, 0, -1) is a 0-eigenvector of B and its H0 part avoids ker A0 = span(e1)
        let op = BlockOperator::new(
            ComplexMatrix::from_diagonal(&[0.0, 1.0]),
            ComplexMatrix::from_diagonal(&[3.0, 1.0]),
            ComplexMatrix::identity(2),
        )
        .unwrap();
        let cls = classify_all(&op, &t()).unwrap();
        let zero = cls.iter().find(|c| c.lambda.abs() < 1e-8).expect("0 is an eigenvalue of B");
        assert!(zero.in_spec_a0);
        assert_eq!(zero.witnesses[0].tag, CaseTag::CaseII);
        assert!(zero.witnesses[0].in_k_pp);
    }
}
