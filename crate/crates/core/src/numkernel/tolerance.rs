use crate::{Error, Result};

/// Numerical thresholds shared by every operation in the crate.
///
/// `eig_cluster_tol` is an absolute radius: eigenvalues closer than this are
/// merged into one spectral cluster, and a point counts as an eigenvalue of a
/// matrix when it lies within this radius of one. `rank_rtol` is relative to the
/// largest singular value. `residual_tol` bounds relative residuals of operator
/// identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceProfile {
    pub eig_cluster_tol: f64,
    pub rank_rtol: f64,
    pub residual_tol: f64,
}

impl ToleranceProfile {
    pub const DEFAULT_EIG_CLUSTER_RTOL: f64 = 1e-8;
    pub const DEFAULT_RANK_RTOL: f64 = 1e-10;
    pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-8;

    pub fn new(eig_cluster_tol: f64, rank_rtol: f64, residual_tol: f64) -> Result<Self> {
        let t = Self {
            eig_cluster_tol,
            rank_rtol,
            residual_tol,
        };
        t.validate()?;
        Ok(t)
    }

    /// Default profile with the clustering radius scaled to a matrix norm,
    /// `1e-8 * max(norm, 1)`.
    pub fn scaled_to(norm: f64) -> Self {
        Self {
            eig_cluster_tol: Self::DEFAULT_EIG_CLUSTER_RTOL * norm.max(1.0),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eig_cluster_tol", self.eig_cluster_tol),
            ("rank_rtol", self.rank_rtol),
            ("residual_tol", self.residual_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} must be finite and strictly positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        Self {
            eig_cluster_tol: Self::DEFAULT_EIG_CLUSTER_RTOL,
            rank_rtol: Self::DEFAULT_RANK_RTOL,
            residual_tol: Self::DEFAULT_RESIDUAL_TOL,
        }
    }
}
