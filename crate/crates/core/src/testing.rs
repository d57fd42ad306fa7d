//! Fixtures and seeded random instance generators for property suites.

use num_complex::Complex64;
use rand::Rng;

use crate::blockmodel::BlockOperator;
use crate::numkernel::{orthonormal_columns, ComplexMatrix};

pub use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng as TestRng;

/// The 4x4 fixture with `A0 = diag(1, 0)`, `V = [[1, 0], [1, 1]]`, `A1 = 0`: three
/// eigenvalues of `B` avoid `spec(A0)` and `lambda = 1` is shared with `A0`.
pub fn example_3_3() -> BlockOperator {
    BlockOperator::new(
        ComplexMatrix::from_diagonal(&[1.0, 0.0]),
        ComplexMatrix::zeros(2, 2),
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[1.0, 1.0]]),
    )
    .expect("fixture is valid")
}

/// `A0 = [-1]`, `A1 = [1]`, `V = [1]`; `B` has eigenvalues `±sqrt 2` and the Riccati
/// equation reduces to `-X^2 + 2X + 1 = 0`.
pub fn scalar_fixture() -> BlockOperator {
    scalar_op(-1.0, 1.0, 1.0)
}

/// `A0 = A1 = [0]`, `V = [1]`, i.e. `B = [[0, 1], [1, 0]]`.
pub fn pauli_fixture() -> BlockOperator {
    scalar_op(0.0, 0.0, 1.0)
}

pub fn scalar_op(a0: f64, a1: f64, v: f64) -> BlockOperator {
    BlockOperator::new(
        ComplexMatrix::from_diagonal(&[a0]),
        ComplexMatrix::from_diagonal(&[a1]),
        ComplexMatrix::from_real_rows(&[&[v]]),
    )
    .expect("scalar fixture is valid")
}

/// A cyclic instance where the witnesses of eigenvalues outside the collision set do not
/// span `H1`: eigenvalues 0 and 1 of `B` are shared with `A0 = diag(0, 1)` and the sum of
/// their eigenvectors `(1,1,1,0) + (-1,-1,2,1)` lies in `H1`, so every other eigenvector is
/// orthogonal to `(0, 0, 3, 1)`.
pub fn collision_fixture() -> BlockOperator {
    BlockOperator::new(
        ComplexMatrix::from_diagonal(&[0.0, 1.0]),
        ComplexMatrix::from_real_rows(&[&[1.0, -1.0], &[-1.0, 4.0]]),
        ComplexMatrix::from_real_rows(&[&[0.0, -1.0], &[-1.0, 2.0]]),
    )
    .expect("fixture is valid")
}

pub fn rng(seed: u64) -> TestRng {
    TestRng::seed_from_u64(seed)
}

pub fn random_complex<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    random_complex(rng, n, n).hermitian_part()
}

/// Haar-ish unitary from orthonormalising a random complex matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    loop {
        let q = orthonormal_columns(&random_complex(rng, n, n), 1e-6);
        if q.cols() == n {
            return q;
        }
    }
}

/// Dense random complex instance; cyclic with probability one.
pub fn random_block_operator<R: Rng>(rng: &mut R, d0: usize, n: usize) -> BlockOperator {
    BlockOperator::new(random_hermitian(rng, d0), random_hermitian(rng, n), random_complex(rng, d0, n))
        .expect("random instance is valid")
}

/// `U diag(values) U*` with a random unitary `U`.
pub fn hermitian_with_spectrum<R: Rng>(rng: &mut R, values: &[f64]) -> ComplexMatrix {
    let u = random_unitary(rng, values.len());
    (&(&u * &ComplexMatrix::from_diagonal(values)) * &u.adjoint()).hermitian_part()
}

/// Instances with small-integer spectra and sparse integer couplings, so exact eigenvalue
/// coincidences (inside `A0`, `A1` and between them) occur often. About half of the draws
/// violate cyclicity.
pub fn structured_block_operator<R: Rng>(rng: &mut R, d0: usize, n: usize) -> BlockOperator {
    let spectrum = |rng: &mut R, k: usize| -> Vec<f64> { (0..k).map(|_| rng.gen_range(-2i32..=2) as f64).collect() };
    let a0_vals = spectrum(rng, d0);
    let a1_vals = spectrum(rng, n);
    let a0 = if rng.gen_bool(0.5) {
        ComplexMatrix::from_diagonal(&a0_vals)
    } else {
        hermitian_with_spectrum(rng, &a0_vals)
    };
    let a1 = ComplexMatrix::from_diagonal(&a1_vals);
    let density = rng.gen_range(0.2..1.0);
    let v = ComplexMatrix::from_fn(d0, n, |_, _| {
        if rng.gen_bool(density) {
            Complex64::new(rng.gen_range(-2i32..=2) as f64, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    BlockOperator::new(a0, a1, v).expect("structured instance is valid")
}

/// Splits a Hermitian `(d0+n) x (d0+n)` matrix into blocks.
pub fn split_blocks(b: &ComplexMatrix, d0: usize) -> BlockOperator {
    let n = b.rows() - d0;
    BlockOperator::new(
        b.submatrix(0, 0, d0, d0).hermitian_part(),
        b.submatrix(d0, d0, n, n).hermitian_part(),
        b.submatrix(0, d0, d0, n),
    )
    .expect("blocks of a Hermitian matrix")
}

/// Instance whose `B` has the eigenvalue `lambda` with multiplicity exactly `n`: a
/// diagonal model with `lambda` repeated `n` times and `d0` distinct other eigenvalues,
/// conjugated by a random unitary.
pub fn operator_with_multiplicity_n<R: Rng>(rng: &mut R, d0: usize, n: usize, lambda: f64) -> BlockOperator {
    let mut values = vec![lambda; n];
    let mut k = 0;
    while k < d0 {
        let mu: f64 = rng.gen_range(-3.0..3.0);
        if (mu - lambda).abs() > 0.2 && values.iter().skip(n).all(|w: &f64| (w - mu).abs() > 0.05) {
            values.push(mu);
            k += 1;
        }
    }
    split_blocks(&hermitian_with_spectrum(rng, &values), d0)
}

/// Point in the upper half plane with `Im z` log-uniform in `[im_lo, im_hi]`.
pub fn random_upper_half_plane<R: Rng>(rng: &mut R, re_span: f64, im_lo: f64, im_hi: f64) -> Complex64 {
    let t: f64 = rng.gen_range(im_lo.ln()..=im_hi.ln());
    Complex64::new(rng.gen_range(-re_span..re_span), t.exp())
}
