use std::ops::Range;

use num_complex::Complex64;

use super::{ComplexMatrix, ToleranceProfile};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// A group of eigenvalues that are numerically the same point of the spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenCluster {
    /// Mean of the member eigenvalues.
    pub value: f64,
    /// Positions in the ascending eigenvalue list.
    pub indices: Range<usize>,
}

impl EigenCluster {
    pub fn multiplicity(&self) -> usize {
        self.indices.len()
    }
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot entry with a diagonal
/// unitary, then applies the real symmetric Jacobi rotation.
pub fn hermitian_eig(m: &ComplexMatrix, tol: &ToleranceProfile) -> Result<HermitianEigenDecomposition> {
    m.ensure_finite("hermitian_eig input")?;
    m.ensure_hermitian("hermitian_eig input", tol.rank_rtol)?;
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let norm = a.frobenius_norm();

    if n > 1 && norm > 0.0 {
        let negligible = f64::EPSILON * 1e-2 * norm;
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(&a) <= 1e-15 * norm {
                converged = true;
                break;
            }
            let mut rotations = 0;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    let g = apq.norm();
                    if g <= negligible {
                        a[(p, q)] = Complex64::new(0.0, 0.0);
                        a[(q, p)] = Complex64::new(0.0, 0.0);
                        continue;
                    }
                    rotate(&mut a, &mut v, p, q, apq, g);
                    rotations += 1;
                }
            }
            if rotations == 0 {
                converged = true;
                break;
            }
        }
        if !converged && off_diagonal_norm(&a) > 1e-12 * norm {
            return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    Ok(HermitianEigenDecomposition {
        eigenvalues: order.iter().map(|&i| diag[i]).collect(),
        vectors: v.select_columns(&order),
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, apq: Complex64, g: f64) {
    let n = a.rows();
    let phase = apq / g;
    let phase_c = phase.conj();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * g);
    let t = if tau >= 0.0 {
        1.0 / (tau + tau.hypot(1.0))
    } else {
        -1.0 / (-tau + tau.hypot(1.0))
    };
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;

    // A <- A J with J = [[c, s], [-s conj(phase), c conj(phase)]] on (p, q)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * phase_c * s;
        a[(k, q)] = akp * s + akq * phase_c * c;
    }
    // A <- J* A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * phase_c * s;
        v[(k, q)] = vkp * s + vkq * phase_c * c;
    }
}

impl HermitianEigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Groups consecutive eigenvalues whose gap is at most `tol.eig_cluster_tol`.
    pub fn clusters(&self, tol: &ToleranceProfile) -> Vec<EigenCluster> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=self.dim() {
            let split = i == self.dim()
                || self.eigenvalues[i] - self.eigenvalues[i - 1] > tol.eig_cluster_tol;
            if split {
                let members = &self.eigenvalues[start..i];
                out.push(EigenCluster {
                    value: members.iter().sum::<f64>() / members.len() as f64,
                    indices: start..i,
                });
                start = i;
            }
        }
        out
    }

    /// Largest cluster size.
    pub fn max_multiplicity(&self, tol: &ToleranceProfile) -> usize {
        self.clusters(tol)
            .iter()
            .map(EigenCluster::multiplicity)
            .max()
            .unwrap_or(0)
    }

    /// Distance from `lambda` to the nearest eigenvalue (infinite for an empty spectrum).
    pub fn distance_to_spectrum(&self, lambda: f64) -> f64 {
        self.eigenvalues
            .iter()
            .map(|mu| (mu - lambda).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether `lambda` is an eigenvalue within the clustering radius.
    pub fn contains(&self, lambda: f64, tol: &ToleranceProfile) -> bool {
        self.distance_to_spectrum(lambda) <= tol.eig_cluster_tol
    }

    /// Eigenvectors of the given cluster as columns.
    pub fn cluster_vectors(&self, cluster: &EigenCluster) -> ComplexMatrix {
        let idx: Vec<usize> = cluster.indices.clone().collect();
        self.vectors.select_columns(&idx)
    }

    /// Spectral projection `E({lambda})`: sum of `v_i v_i*` over eigenvalues within
    /// the clustering radius of `lambda`.
    pub fn eigenprojection(&self, lambda: f64, tol: &ToleranceProfile) -> ComplexMatrix {
        self.spectral_sum(|mu| {
            if (mu - lambda).abs() <= tol.eig_cluster_tol {
                Some(1.0)
            } else {
                None
            }
        })
    }

    /// `sum_i f(mu_i) v_i v_i*` over the eigenvalues where `f` returns a weight.
    pub fn spectral_sum(&self, f: impl Fn(f64) -> Option<f64>) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &mu) in self.eigenvalues.iter().enumerate() {
            let Some(w) = f(mu) else { continue };
            for i in 0..n {
                let vik = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    /// `V diag(lambda) V*`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.spectral_sum(Some)
    }
}

/// The `eps -> 0+` limit of `(A - lambda - i eps)^{-1}` on the orthogonal complement
/// of the `lambda`-eigenspace of `A`:
///
/// `R(lambda) = sum_{|mu_i - lambda| > eig_cluster_tol} (mu_i - lambda)^{-1} v_i v_i*`.
///
/// The result is Hermitian, so the limits from above and below coincide.
pub fn reduced_resolvent(
    eig: &HermitianEigenDecomposition,
    lambda: f64,
    tol: &ToleranceProfile,
) -> ComplexMatrix {
    eig.spectral_sum(|mu| {
        let d = mu - lambda;
        if d.abs() > tol.eig_cluster_tol {
            Some(1.0 / d)
        } else {
            None
        }
    })
}

/// Spectral norm of the reduced resolvent, `1 / min |mu_i - lambda|` over the kept eigenvalues.
pub fn reduced_resolvent_norm(eig: &HermitianEigenDecomposition, lambda: f64, tol: &ToleranceProfile) -> f64 {
    eig.eigenvalues
        .iter()
        .map(|mu| (mu - lambda).abs())
        .filter(|d| *d > tol.eig_cluster_tol)
        .map(|d| 1.0 / d)
        .fold(0.0, f64::max)
}
