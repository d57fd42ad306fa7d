use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        got: String,
    },

    #[error("matrix {name} contains a non-finite entry")]
    NonFinite { name: String },

    #[error("matrix {name} is empty")]
    Empty { name: String },

    #[error("matrix {name} is not Hermitian (relative defect {defect:.3e})")]
    NotHermitian { name: String, defect: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("matrix is numerically singular (rank {rank} of {dim})")]
    Singular { rank: usize, dim: usize },

    #[error("linear solve residual {residual:.3e} exceeds bound {bound:.3e}")]
    SolveResidual { residual: f64, bound: f64 },

    #[error("Ran V is not cyclic for A0 (Krylov rank {krylov_rank} < {d0})")]
    NotCyclic { krylov_rank: usize, d0: usize },

    #[error(
        "no case equation closes for eigenvalue {lambda} (residual {residual:.3e}, bound {bound:.3e})"
    )]
    ClassificationResidual {
        lambda: f64,
        residual: f64,
        bound: f64,
    },

    #[error("expected exactly {expected} (y, lambda) pairs, got {got}")]
    WrongPairCount { expected: usize, got: usize },

    #[error("witness vectors are linearly dependent (rank {rank} < {n})")]
    DependentWitnesses { rank: usize, n: usize },

    #[error("pair {index} (lambda = {lambda}) violates the witness equation: residual {residual:.3e}, bound {bound:.3e}")]
    CaseEquationFailed {
        index: usize,
        lambda: f64,
        residual: f64,
        bound: f64,
    },

    #[error("eigenvalue {lambda} has multiplicity {multiplicity}; the oracle requires simple spectrum")]
    DegenerateSpectrum { lambda: f64, multiplicity: usize },

    #[error("invalid tolerance profile: {0}")]
    InvalidTolerance(String),

    #[error("invalid scan setup: {0}")]
    InvalidScan(String),
}
