//! The matrix Herglotz function `M(z) = P_{H1} (B - z)^{-1} J_{H1}`, its trace `m(z)`, the
//! atoms of the trace measure and boundary-value scans along `lambda + i eps`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::blockmodel::BlockOperator;
use crate::numkernel::{hermitian_eig, solve_linear, ComplexMatrix, ToleranceProfile};
use crate::{Error, Result};

/// `M(z)` as the lower-right `n x n` block of `(B - z)^{-1}`.
pub fn m_resolvent(op: &BlockOperator, z: Complex64, tol: &ToleranceProfile) -> Result<ComplexMatrix> {
    let shifted = op.assemble_full().shifted(z);
    let cols = solve_linear(&shifted, &op.h1_embedding(), tol)?;
    Ok(cols.submatrix(op.d0(), 0, op.n(), op.n()))
}

/// `M(z) = [(A1 - z) - V* (A0 - z)^{-1} V]^{-1}`, the inverse Schur complement.
pub fn m_schur(op: &BlockOperator, z: Complex64, tol: &ToleranceProfile) -> Result<ComplexMatrix> {
    let inner = solve_linear(&op.a0().shifted(z), op.v(), tol)?;
    let schur = &op.a1().shifted(z) - &(&op.v().adjoint() * &inner);
    solve_linear(&schur, &ComplexMatrix::identity(op.n()), tol)
}

/// One evaluation of `M` and `m = trace M` at a point of the upper half plane.
#[derive(Debug, Clone)]
pub struct HerglotzSample {
    pub z: Complex64,
    pub m_matrix: ComplexMatrix,
    pub m_trace: Complex64,
}

impl HerglotzSample {
    pub fn evaluate(op: &BlockOperator, z: Complex64, tol: &ToleranceProfile) -> Result<Self> {
        if z.im <= 0.0 {
            return Err(Error::InvalidScan(format!("Herglotz samples need Im z > 0, got {z}")));
        }
        let m_matrix = m_schur(op, z, tol)?;
        let m_trace = m_matrix.trace();
        Ok(Self { z, m_matrix, m_trace })
    }

    /// Smallest eigenvalue of `Im M(z) = (M - M*)/(2i)`; nonnegative for a Herglotz function.
    pub fn min_imaginary_eigenvalue(&self, tol: &ToleranceProfile) -> Result<f64> {
        let e = hermitian_eig(&self.m_matrix.imaginary_part(), tol)?;
        Ok(e.eigenvalues.first().copied().unwrap_or(0.0))
    }
}

/// One atom of the matrix measure `Omega = P_{H1} E_B(.) J_{H1}`.
#[derive(Debug, Clone)]
pub struct Atom {
    pub lambda: f64,
    /// `omega({lambda}) = trace Omega({lambda})`.
    pub mass: f64,
    pub omega_block: ComplexMatrix,
}

#[derive(Debug, Clone)]
pub struct AtomTable {
    pub entries: Vec<Atom>,
}

impl AtomTable {
    pub fn total_mass(&self) -> f64 {
        self.entries.iter().map(|a| a.mass).sum()
    }

    pub fn locations(&self) -> Vec<f64> {
        self.entries.iter().map(|a| a.lambda).collect()
    }

    /// `sum mass / (lambda - z)`, the Stieltjes transform of the trace measure.
    pub fn stieltjes(&self, z: Complex64) -> Complex64 {
        self.entries.iter().map(|a| a.mass / (a.lambda - z)).sum()
    }

    /// `sum Omega({lambda}) / (lambda - z)`.
    pub fn matrix_stieltjes(&self, z: Complex64) -> ComplexMatrix {
        let n = self.entries.first().map_or(0, |a| a.omega_block.rows());
        let mut out = ComplexMatrix::zeros(n, n);
        for a in &self.entries {
            out = &out + &a.omega_block.scale(Complex64::new(1.0, 0.0) / (a.lambda - z));
        }
        out
    }
}

/// Masses below this are treated as exact zeros of the compressed projection.
const ZERO_MASS: f64 = 1e-14;

/// Atoms of `omega` computed from the eigendecomposition of `B`: for each eigenvalue
/// cluster, `Omega({lambda}) = P_{H1} E_B({lambda}) J_{H1}`.
pub fn atom_table(op: &BlockOperator, tol: &ToleranceProfile) -> Result<AtomTable> {
    let eig = hermitian_eig(&op.assemble_full(), tol)?;
    let d0 = op.d0();
    let n = op.n();
    let mut entries = Vec::new();
    for cl in eig.clusters(tol) {
        let w1 = eig.cluster_vectors(&cl).submatrix(d0, 0, n, cl.multiplicity());
        let block = &w1 * &w1.adjoint();
        let mass = block.trace().re;
        if mass > ZERO_MASS {
            entries.push(Atom {
                lambda: cl.value,
                mass,
                omega_block: block.hermitian_part(),
            });
        }
    }
    Ok(AtomTable { entries })
}

/// Thresholds that discretise the boundary limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSettings {
    /// Minimum ratio `Im m(lambda + i eps_{k+1}) / Im m(lambda + i eps_k)` per rung.
    pub growth_factor: f64,
    /// Minimum stabilised `eps Im m` for an atom.
    pub atom_floor: f64,
    /// Relative agreement of `eps Im m` on the last two rungs for an atom.
    pub stabilization_rtol: f64,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            growth_factor: 5.0,
            atom_floor: 1e-6,
            stabilization_rtol: 0.05,
        }
    }
}

/// Geometric ladder `hi, hi/ratio, ...` down to `lo` (inclusive within rounding).
pub fn geometric_ladder(hi: f64, lo: f64, ratio: f64) -> Result<Vec<f64>> {
    if !(hi.is_finite() && lo.is_finite() && ratio.is_finite()) || lo <= 0.0 || hi < lo || ratio <= 1.0 {
        return Err(Error::InvalidScan(format!(
            "eps ladder needs hi >= lo > 0 and ratio > 1, got {hi}:{lo}:{ratio}"
        )));
    }
    let steps = ((hi / lo).ln() / ratio.ln() + 1e-9).floor() as i32;
    Ok((0..=steps).map(|k| hi / ratio.powi(k)).collect())
}

/// `1e-2, 1e-3, ..., 1e-8`.
pub fn default_ladder() -> Vec<f64> {
    geometric_ladder(1e-2, 1e-8, 10.0).expect("static ladder")
}

/// `points` equally spaced values from `min` to `max` inclusive.
pub fn uniform_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 || !(min.is_finite() && max.is_finite()) || max < min {
        return Err(Error::InvalidScan(format!("grid {min}:{max}:{points} is empty or malformed")));
    }
    if points == 1 {
        return Ok(vec![min]);
    }
    let span = max - min;
    Ok((0..points)
        .map(|k| min + span * k as f64 / (points - 1) as f64)
        .collect())
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    pub grid: Vec<f64>,
    pub eps_ladder: Vec<f64>,
    /// `trace Im m(lambda + i eps)`, one row per grid point, one column per rung.
    pub trace_im_values: Vec<Vec<f64>>,
    /// Grid points where the trace blows up along the whole lower half of the ladder.
    pub flagged_singular: Vec<f64>,
    /// `(lambda, estimated mass)` where `eps Im m` stabilises above the floor.
    pub flagged_atoms: Vec<(f64, f64)>,
    /// `flagged_singular` minus atom locations; expected empty in finite dimensions.
    pub singular_continuous: Vec<f64>,
}

fn validate_scan(grid: &[f64], ladder: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidScan("empty grid".into()));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidScan("grid contains non-finite points".into()));
    }
    if ladder.len() < 2 {
        return Err(Error::InvalidScan("eps ladder needs at least two rungs".into()));
    }
    if ladder.iter().any(|e| !(e.is_finite() && *e > 0.0)) || ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidScan("eps ladder must be positive and strictly decreasing".into()));
    }
    Ok(())
}

/// Decision for one grid point from its column of `Im` values.
fn judge(values: &[f64], ladder: &[f64], settings: &ScanSettings) -> (bool, Option<f64>) {
    let last = ladder.len() - 1;
    let start = last / 2;
    let singular = (start..last).all(|k| values[k] > 0.0 && values[k + 1] >= settings.growth_factor * values[k]);
    if !singular {
        return (false, None);
    }
    let mass_last = ladder[last] * values[last];
    let mass_prev = ladder[last - 1] * values[last - 1];
    let stable = (mass_last - mass_prev).abs() <= settings.stabilization_rtol * mass_last.abs();
    if stable && mass_last > settings.atom_floor {
        (true, Some(mass_last))
    } else {
        (true, None)
    }
}

fn scan_with<F>(grid: &[f64], ladder: &[f64], settings: &ScanSettings, eval: F) -> Result<ScanReport>
where
    F: Fn(Complex64) -> Result<f64> + Sync,
{
    validate_scan(grid, ladder)?;
    let rows: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|&lambda| {
            ladder
                .iter()
                .map(|&eps| eval(Complex64::new(lambda, eps)))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut flagged_singular = Vec::new();
    let mut flagged_atoms = Vec::new();
    let mut singular_continuous = Vec::new();
    for (&lambda, values) in grid.iter().zip(&rows) {
        let (singular, atom) = judge(values, ladder, settings);
        if singular {
            flagged_singular.push(lambda);
            match atom {
                Some(mass) => flagged_atoms.push((lambda, mass)),
                None => singular_continuous.push(lambda),
            }
        }
    }
    Ok(ScanReport {
        grid: grid.to_vec(),
        eps_ladder: ladder.to_vec(),
        trace_im_values: rows,
        flagged_singular,
        flagged_atoms,
        singular_continuous,
    })
}

/// Scans `trace Im m(lambda + i eps)` over `grid x ladder` and flags the numerical
/// stand-ins for the singular support and the atoms of `omega`.
///
/// Grid points are evaluated in parallel; the report keeps the input order.
pub fn boundary_scan(
    op: &BlockOperator,
    grid: &[f64],
    ladder: &[f64],
    settings: &ScanSettings,
    tol: &ToleranceProfile,
) -> Result<ScanReport> {
    scan_with(grid, ladder, settings, |z| Ok(m_resolvent(op, z, tol)?.trace().im))
}

/// Same scan for the coupling function `trace V* (A0 - z)^{-1} V`, whose atoms are the
/// eigenvalues of `A0` seen by `Ran V`.
pub fn coupling_scan(
    op: &BlockOperator,
    grid: &[f64],
    ladder: &[f64],
    settings: &ScanSettings,
    tol: &ToleranceProfile,
) -> Result<ScanReport> {
    scan_with(grid, ladder, settings, |z| {
        let inner = solve_linear(&op.a0().shifted(z), op.v(), tol)?;
        Ok((&op.v().adjoint() * &inner).trace().im)
    })
}
