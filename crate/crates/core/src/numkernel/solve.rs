use num_complex::Complex64;

use super::{numerical_rank, ComplexMatrix, ToleranceProfile};
use crate::{Error, Result};

/// Solves `M X = rhs` for square `M` by LU with partial pivoting.
///
/// Rejects numerically singular `M` up front and verifies the residual
/// `‖M X - rhs‖_F <= residual_tol (‖M‖_F ‖X‖_F + ‖rhs‖_F)` afterwards, so a
/// least-squares style answer never leaks out.
pub fn solve_linear(m: &ComplexMatrix, rhs: &ComplexMatrix, tol: &ToleranceProfile) -> Result<ComplexMatrix> {
    if !m.is_square() || m.rows() != rhs.rows() {
        return Err(Error::DimensionMismatch {
            context: "solve_linear",
            expected: format!("square M with {} rows in rhs", m.rows()),
            got: format!("M {}x{}, rhs {}x{}", m.rows(), m.cols(), rhs.rows(), rhs.cols()),
        });
    }
    let n = m.rows();
    let rank = numerical_rank(m, tol);
    if rank < n {
        return Err(Error::Singular { rank, dim: n });
    }
    let x = lu_solve(m, rhs).ok_or(Error::Singular { rank, dim: n })?;
    let residual = (&m.matmul(&x) - rhs).frobenius_norm();
    let bound = tol.residual_tol * (m.frobenius_norm() * x.frobenius_norm() + rhs.frobenius_norm());
    if residual > bound {
        return Err(Error::SolveResidual { residual, bound });
    }
    Ok(x)
}

/// `M^{-1}` through [`solve_linear`].
pub fn inverse(m: &ComplexMatrix, tol: &ToleranceProfile) -> Result<ComplexMatrix> {
    solve_linear(m, &ComplexMatrix::identity(m.rows()), tol)
}

fn lu_solve(m: &ComplexMatrix, rhs: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = m.rows();
    let k = rhs.cols();
    let mut a = m.clone();
    let mut b = rhs.clone();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))?;
        if a[(piv, col)].norm() == 0.0 {
            return None;
        }
        if piv != col {
            for j in 0..n {
                let t = a[(col, j)];
                a[(col, j)] = a[(piv, j)];
                a[(piv, j)] = t;
            }
            for j in 0..k {
                let t = b[(col, j)];
                b[(col, j)] = b[(piv, j)];
                b[(piv, j)] = t;
            }
        }
        let d = a[(col, col)];
        for i in col + 1..n {
            let f = a[(i, col)] / d;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            a[(i, col)] = f;
            for j in col + 1..n {
                let u = a[(col, j)];
                a[(i, j)] -= f * u;
            }
            for j in 0..k {
                let u = b[(col, j)];
                b[(i, j)] -= f * u;
            }
        }
    }
    // back substitution
    let mut x = ComplexMatrix::zeros(n, k);
    for j in 0..k {
        for i in (0..n).rev() {
            let mut s = b[(i, j)];
            for l in i + 1..n {
                s -= a[(i, l)] * x[(l, j)];
            }
            x[(i, j)] = s / a[(i, i)];
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_returns_rhs() {
        let t = ToleranceProfile::default();
        let rhs = ComplexMatrix::from_fn(3, 2, |i, j| c(i as f64, j as f64 - 1.0));
        let x = solve_linear(&ComplexMatrix::identity(3), &rhs, &t).unwrap();
        assert!((&x - &rhs).max_abs() < 1e-15);
    }

    #[test]
    fn diagonal_solve() {
        let t = ToleranceProfile::default();
        let m = ComplexMatrix::from_diagonal(&[2.0, 4.0]);
        let rhs = ComplexMatrix::from_real_rows(&[&[1.0], &[1.0]]);
        let x = solve_linear(&m, &rhs, &t).unwrap();
        assert!((x[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((x[(1, 0)] - c(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn resolvent_of_example_a0_matches_direct_inverse() {
        // (A0 - z)^{-1} V with A0 = diag(1, 0), V = [[1,0],[1,1]], z = 1 + i.
        let t = ToleranceProfile::default();
        let z = c(1.0, 1.0);
        let a0 = ComplexMatrix::from_diagonal(&[1.0, 0.0]);
        let v = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[1.0, 1.0]]);
        let x = solve_linear(&a0.shifted(z), &v, &t).unwrap();
        // diagonal oracle: rows scaled by 1/(1 - z) = i and 1/(0 - z) = (-1 + i)/2
        let d0 = c(1.0, 0.0) / (c(1.0, 0.0) - z);
        let d1 = c(1.0, 0.0) / (-z);
        assert!((d0 - c(0.0, 1.0)).norm() < 1e-15);
        let expect = ComplexMatrix::try_from_rows(&[
            vec![d0, c(0.0, 0.0)],
            vec![d1, d1],
        ])
        .unwrap();
        assert!((&x - &expect).max_abs() < 1e-15);
    }

    #[test]
    fn singular_is_rejected() {
        let t = ToleranceProfile::default();
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        let rhs = ComplexMatrix::identity(2);
        assert!(matches!(solve_linear(&m, &rhs, &t), Err(Error::Singular { rank: 1, dim: 2 })));
    }
}
