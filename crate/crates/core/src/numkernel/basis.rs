use num_complex::Complex64;

use super::matrix::{dot, vec_norm};
use super::ComplexMatrix;

/// Gram-Schmidt with one reorthogonalisation pass (CGS2).
///
/// Returns the orthonormalised component of `w` against `basis`, together with
/// its norm before normalisation.
pub fn orthogonalize_against(basis: &[Vec<Complex64>], w: &[Complex64]) -> (Vec<Complex64>, f64) {
    let mut r = w.to_vec();
    for _ in 0..2 {
        for q in basis {
            let p = dot(q, &r);
            for (ri, qi) in r.iter_mut().zip(q) {
                *ri -= p * qi;
            }
        }
    }
    let nrm = vec_norm(&r);
    if nrm > 0.0 {
        for ri in r.iter_mut() {
            *ri /= nrm;
        }
    }
    (r, nrm)
}

/// Orthonormal basis for the column span of `m`, dropping columns whose residual
/// after orthogonalisation is at most `drop_tol`.
pub fn orthonormal_columns(m: &ComplexMatrix, drop_tol: f64) -> ComplexMatrix {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for col in m.columns() {
        let (q, nrm) = orthogonalize_against(&basis, &col);
        if nrm > drop_tol {
            basis.push(q);
        }
    }
    ComplexMatrix::from_columns(m.rows(), &basis)
}
