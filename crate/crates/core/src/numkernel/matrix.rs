use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting wrong lengths and non-finite entries.
    pub fn try_from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "ComplexMatrix::try_from_vec",
                expected: format!("{} entries", rows * cols),
                got: format!("{} entries", data.len()),
            });
        }
        let m = Self { rows, cols, data };
        m.ensure_finite("input")?;
        Ok(m)
    }

    /// Builds a matrix from nested rows. All rows must have equal length.
    pub fn try_from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimensionMismatch {
                context: "ComplexMatrix::try_from_rows",
                expected: format!("rows of length {c}"),
                got: format!("row of length {}", bad.len()),
            });
        }
        Self::try_from_vec(r, c, rows.iter().flatten().copied().collect())
    }

    /// Convenience constructor for real matrices; panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<Complex64>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column {j} has wrong length");
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn column_vector(v: &[Complex64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[Complex64]) {
        assert_eq!(col.len(), self.rows);
        for (i, &v) in col.iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    pub fn columns(&self) -> Vec<Vec<Complex64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Copy of the block `rows x cols` starting at (`r0`, `c0`).
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols);
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &ComplexMatrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    /// Columns selected by index, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// `self - shift * I`.
    pub fn shifted(&self, shift: Complex64) -> Self {
        assert!(self.is_square());
        let mut m = self.clone();
        for i in 0..self.rows {
            m[(i, i)] -= shift;
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Hermitian part `(M + M*)/2`.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    /// Imaginary part in the operator sense, `(M - M*)/(2i)`; always Hermitian.
    pub fn imaginary_part(&self) -> Self {
        assert!(self.is_square());
        let two_i = Complex64::new(0.0, 2.0);
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] - self[(j, i)].conj()) / two_i
        })
    }

    /// `‖M - M*‖_F / ‖M‖_F` (0 for the zero matrix).
    pub fn hermitian_defect(&self) -> f64 {
        assert!(self.is_square());
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt() / norm
    }

    pub fn ensure_finite(&self, name: &str) -> Result<()> {
        if self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite {
                name: name.to_string(),
            })
        }
    }

    /// Checks squareness and Hermiticity within `rtol * ‖M‖_F`.
    pub fn ensure_hermitian(&self, name: &str, rtol: f64) -> Result<()> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                context: "Hermitian check",
                expected: "square matrix".into(),
                got: format!("{}x{} ({name})", self.rows, self.cols),
            });
        }
        let defect = self.hermitian_defect();
        if defect > rtol {
            return Err(Error::NotHermitian {
                name: name.to_string(),
                defect,
            });
        }
        Ok(())
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols, "apply: vector length mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    fn zip_with(&self, rhs: &ComplexMatrix, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for v in self.row(i) {
                write!(f, "{:>+.6}{:+.6}i  ", v.re, v.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    // <a, b> = a* b, conjugate-linear in the first slot
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn vec_norm(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_ragged_and_nonfinite() {
        let ragged = vec![vec![c(1.0, 0.0)], vec![c(1.0, 0.0), c(2.0, 0.0)]];
        assert!(matches!(
            ComplexMatrix::try_from_rows(&ragged),
            Err(Error::DimensionMismatch { .. })
        ));
        let nan = vec![vec![c(f64::NAN, 0.0)]];
        assert!(matches!(
            ComplexMatrix::try_from_rows(&nan),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn adjoint_and_product() {
        let a = ComplexMatrix::try_from_rows(&[
            vec![c(1.0, 1.0), c(2.0, 0.0)],
            vec![c(0.0, -1.0), c(3.0, 2.0)],
        ])
        .unwrap();
        let ah = a.adjoint();
        assert_eq!(ah[(0, 1)], c(0.0, 1.0));
        assert_eq!(ah[(1, 0)], c(2.0, 0.0));
        let g = &ah * &a;
        assert!(g.hermitian_defect() < 1e-15);
        // (A*A)_00 = |1+i|^2 + |-i|^2 = 3
        assert_eq!(g[(0, 0)], c(3.0, 0.0));
    }

    #[test]
    fn imaginary_part_is_hermitian_and_correct() {
        let m = ComplexMatrix::try_from_rows(&[
            vec![c(1.0, 2.0), c(0.0, 1.0)],
            vec![c(0.0, 1.0), c(-1.0, 0.5)],
        ])
        .unwrap();
        let im = m.imaginary_part();
        assert!(im.hermitian_defect() < 1e-15);
        assert!((im[(0, 0)] - c(2.0, 0.0)).norm() < 1e-15);
        assert!((im[(1, 1)] - c(0.5, 0.0)).norm() < 1e-15);
        // (i - conj(i)) / 2i = 1
        assert!((im[(0, 1)] - c(1.0, 0.0)).norm() < 1e-15);
    }
}
