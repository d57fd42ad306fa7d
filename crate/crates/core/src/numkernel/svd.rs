use num_complex::Complex64;

use super::matrix::{dot, vec_norm};
use super::{ComplexMatrix, ToleranceProfile};

const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `M = U diag(s) V*` with `s` descending.
///
/// `u` is `rows x k`, `v` is `cols x k` with `k = min(rows, cols)`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

/// One-sided (Hestenes) Jacobi SVD. Accurate small singular values, which the
/// rank decisions downstream depend on.
pub fn svd(m: &ComplexMatrix) -> Svd {
    if m.rows() < m.cols() {
        let t = svd_tall(&m.adjoint());
        return Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        };
    }
    svd_tall(m)
}

fn svd_tall(m: &ComplexMatrix) -> Svd {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<Complex64>> = m.columns();
    let mut v: Vec<Vec<Complex64>> = ComplexMatrix::identity(cols).columns();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let alpha = a[i].iter().map(|x| x.norm_sqr()).sum::<f64>();
                let beta = a[j].iter().map(|x| x.norm_sqr()).sum::<f64>();
                let gamma = dot(&a[i], &a[j]);
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + zeta.hypot(1.0))
                } else {
                    -1.0 / (-zeta + zeta.hypot(1.0))
                };
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                // b_j = a_j * conj(phase) makes <a_i, b_j> real; then a real rotation.
                rotate_pair(&mut a, i, j, c, s, phase.conj());
                rotate_pair(&mut v, i, j, c, s, phase.conj());
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<(f64, usize)> = a.iter().enumerate().map(|(k, col)| (vec_norm(col), k)).collect();
    sv.sort_by(|x, y| y.0.total_cmp(&x.0));
    let smax = sv.first().map_or(0.0, |x| x.0);

    let mut u = ComplexMatrix::zeros(rows, cols);
    let mut vm = ComplexMatrix::zeros(cols, cols);
    let mut values = Vec::with_capacity(cols);
    let mut done_u: Vec<Vec<Complex64>> = Vec::new();
    for (pos, &(s, k)) in sv.iter().enumerate() {
        values.push(s);
        vm.set_column(pos, &v[k]);
        let col: Vec<Complex64> = if s > f64::EPSILON * smax.max(f64::MIN_POSITIVE) * rows as f64 {
            a[k].iter().map(|x| x / s).collect()
        } else {
            // left vector of a (numerically) zero singular value: complete the basis
            complete_basis(rows, &done_u)
        };
        done_u.push(col.clone());
        u.set_column(pos, &col);
    }
    Svd {
        u,
        singular_values: values,
        v: vm,
    }
}

fn rotate_pair(cols: &mut [Vec<Complex64>], i: usize, j: usize, c: f64, s: f64, phase: Complex64) {
    let (left, right) = cols.split_at_mut(j);
    let ai = &mut left[i];
    let aj = &mut right[0];
    for (x, y) in ai.iter_mut().zip(aj.iter_mut()) {
        let yb = *y * phase;
        let xi = *x;
        *x = xi * c - yb * s;
        *y = xi * s + yb * c;
    }
}

fn complete_basis(rows: usize, existing: &[Vec<Complex64>]) -> Vec<Complex64> {
    for e in 0..rows {
        let mut cand = vec![Complex64::new(0.0, 0.0); rows];
        cand[e] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for q in existing {
                let p = dot(q, &cand);
                for (c, qi) in cand.iter_mut().zip(q) {
                    *c -= p * qi;
                }
            }
        }
        let nrm = vec_norm(&cand);
        if nrm > 0.5 {
            return cand.into_iter().map(|c| c / nrm).collect();
        }
    }
    vec![Complex64::new(0.0, 0.0); rows]
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    svd(m).singular_values
}

pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Number of singular values above `rank_rtol * sigma_max`; 0 for the zero matrix.
pub fn numerical_rank(m: &ComplexMatrix, tol: &ToleranceProfile) -> usize {
    let s = singular_values(m);
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > tol.rank_rtol * smax).count()
}

/// Smallest singular value divided by the largest (0 for rank-deficient shapes).
pub fn inverse_condition(m: &ComplexMatrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if hi > 0.0 && s.len() == m.cols().min(m.rows()) => lo / hi,
        _ => 0.0,
    }
}

/// Orthonormal basis (columns) of the null space of `m`: right singular vectors whose
/// singular value is at most `abs_tol`.
pub fn null_space(m: &ComplexMatrix, abs_tol: f64) -> ComplexMatrix {
    let cols = m.cols();
    // pad with zero rows so the thin SVD carries all `cols` right singular vectors
    let padded = if m.rows() < cols {
        let mut p = ComplexMatrix::zeros(cols, cols);
        p.set_block(0, 0, m);
        p
    } else {
        m.clone()
    };
    let d = svd(&padded);
    let idx: Vec<usize> = (0..cols).filter(|&k| d.singular_values[k] <= abs_tol).collect();
    d.v.select_columns(&idx)
}

/// Orthonormal complement (within `C^k`) of the column span of `basis`, which must
/// have orthonormal columns.
pub fn orthogonal_complement(basis: &ComplexMatrix, k: usize) -> ComplexMatrix {
    let mut have: Vec<Vec<Complex64>> = basis.columns();
    let mut out = Vec::new();
    while have.len() < k {
        let c = complete_basis(k, &have);
        have.push(c.clone());
        out.push(c);
    }
    ComplexMatrix::from_columns(k, &out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_fixtures() {
        let t = ToleranceProfile::default();
        assert_eq!(numerical_rank(&ComplexMatrix::zeros(2, 3), &t), 0);
        assert_eq!(numerical_rank(&ComplexMatrix::identity(4), &t), 4);
        let v = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[1.0, 1.0]]);
        assert_eq!(numerical_rank(&v, &t), 2);
        let r1 = ComplexMatrix::from_real_rows(&[&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]]);
        assert_eq!(numerical_rank(&r1, &t), 1);
    }

    #[test]
    fn svd_reconstructs_wide_and_tall() {
        let m = ComplexMatrix::from_fn(3, 5, |i, j| Complex64::new((i + 2 * j) as f64, (i as f64) - (j as f64) * 0.5));
        for a in [m.clone(), m.adjoint()] {
            let d = svd(&a);
            let k = d.singular_values.len();
            let mut s = ComplexMatrix::zeros(k, k);
            for i in 0..k {
                s[(i, i)] = Complex64::new(d.singular_values[i], 0.0);
            }
            let rec = &(&d.u * &s) * &d.v.adjoint();
            assert!((&rec - &a).frobenius_norm() < 1e-12 * a.frobenius_norm());
            assert!(d.singular_values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn null_space_of_rank_one() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 1.0, 0.0]]);
        let ns = null_space(&m, 1e-12);
        assert_eq!(ns.cols(), 2);
        assert!((&m * &ns).max_abs() < 1e-14);
    }
}
