use itertools::Itertools;
use rayon::prelude::*;

use crate::blockmodel::BlockOperator;
use crate::numkernel::{hermitian_eig, inverse, inverse_condition, ComplexMatrix, HermitianEigenDecomposition, ToleranceProfile};
use crate::{Error, Result};

use super::{max_entry_distance, RiccatiSolution};

/// A solution read off a `B`-invariant graph subspace.
#[derive(Debug, Clone)]
pub struct GraphSolution {
    pub solution: RiccatiSolution,
    /// Indices (ascending eigenvalue order) of the eigenvectors spanning the graph.
    pub subset: Vec<usize>,
    pub eigenvalues: Vec<f64>,
}

/// Output of [`oracle_graph_solutions_basis`].
#[derive(Debug, Clone)]
pub struct BasisOracle {
    pub solutions: Vec<GraphSolution>,
    /// Set when `B` has a repeated eigenvalue: only subsets of one fixed eigenbasis were
    /// tried, so invariant subspaces mixing eigenspace directions differently are missed.
    pub incomplete: bool,
}

/// Every `X = W1 W0^{-1}` obtained from `d0` eigenvectors of `B` whose `H0` components
/// form a basis. Requires a simple spectrum, where these are all graph solutions.
pub fn oracle_graph_solutions(op: &BlockOperator, tol: &ToleranceProfile) -> Result<Vec<GraphSolution>> {
    let eig = hermitian_eig(&op.assemble_full(), tol)?;
    if let Some(c) = eig.clusters(tol).into_iter().find(|c| c.multiplicity() > 1) {
        return Err(Error::DegenerateSpectrum {
            lambda: c.value,
            multiplicity: c.multiplicity(),
        });
    }
    enumerate(op, &eig, tol)
}

/// Like [`oracle_graph_solutions`] but tolerates repeated eigenvalues by enumerating
/// subsets of the computed eigenbasis.
pub fn oracle_graph_solutions_basis(op: &BlockOperator, tol: &ToleranceProfile) -> Result<BasisOracle> {
    let eig = hermitian_eig(&op.assemble_full(), tol)?;
    let incomplete = eig.max_multiplicity(tol) > 1;
    Ok(BasisOracle {
        solutions: enumerate(op, &eig, tol)?,
        incomplete,
    })
}

fn enumerate(op: &BlockOperator, eig: &HermitianEigenDecomposition, tol: &ToleranceProfile) -> Result<Vec<GraphSolution>> {
    let d0 = op.d0();
    let n = op.n();
    let subsets: Vec<Vec<usize>> = (0..d0 + n).combinations(d0).collect();
    let found: Vec<Option<GraphSolution>> = subsets
        .into_par_iter()
        .map(|subset| -> Result<Option<GraphSolution>> {
            let w = eig.vectors.select_columns(&subset);
            let w0 = w.submatrix(0, 0, d0, d0);
            if inverse_condition(&w0) <= tol.rank_rtol {
                return Ok(None);
            }
            let w1 = w.submatrix(d0, 0, n, d0);
            let x: ComplexMatrix = &w1 * &inverse(&w0, tol)?;
            let solution = RiccatiSolution::evaluate(op, x, None)?;
            if !solution.residual_ok(tol) {
                return Ok(None);
            }
            let eigenvalues = subset.iter().map(|&k| eig.eigenvalues[k]).collect();
            Ok(Some(GraphSolution {
                solution,
                subset,
                eigenvalues,
            }))
        })
        .collect::<Result<_>>()?;

    let mut out: Vec<GraphSolution> = Vec::new();
    for g in found.into_iter().flatten() {
        let dup = out.iter().any(|h| {
            let scale = 1.0 + h.solution.x.max_abs();
            max_entry_distance(&h.solution.x, &g.solution.x) <= 1e-9 * scale
        });
        if !dup {
            out.push(g);
        }
    }
    Ok(out)
}
