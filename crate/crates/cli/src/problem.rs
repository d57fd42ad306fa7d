use std::path::Path;

use num_complex::Complex64;
use riccati_core::blockmodel::BlockOperator;
use riccati_core::numkernel::ComplexMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// A matrix entry: a real number or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    pub fn value(self) -> Complex64 {
        match self {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }

    pub fn from_value(z: Complex64) -> Self {
        if z.im == 0.0 {
            Entry::Real(z.re)
        } else {
            Entry::Complex([z.re, z.im])
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    pub eig: Option<f64>,
    pub rank: Option<f64>,
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderSpec {
    pub hi: f64,
    pub lo: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub grid: Option<GridSpec>,
    pub eps_ladder: Option<LadderSpec>,
}

/// Input file: the three blocks as nested row arrays plus optional settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub a0: Vec<Vec<Entry>>,
    pub a1: Vec<Vec<Entry>>,
    pub v: Vec<Vec<Entry>>,
    #[serde(default)]
    pub tolerances: Option<ToleranceSpec>,
    #[serde(default)]
    pub scan: Option<ScanSpec>,
}

pub struct LoadedProblem {
    pub file: ProblemFile,
    pub op: BlockOperator,
    /// Hex SHA-256 of the raw input bytes.
    pub digest: String,
}

fn to_matrix(name: &str, rows: &[Vec<Entry>]) -> Result<ComplexMatrix, CliError> {
    let rows: Vec<Vec<Complex64>> = rows.iter().map(|r| r.iter().map(|e| e.value()).collect()).collect();
    ComplexMatrix::try_from_rows(&rows).map_err(|e| CliError::Input(format!("block {name}: {e}")))
}

pub fn matrix_rows(m: &ComplexMatrix) -> Vec<Vec<Entry>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|&z| Entry::from_value(z)).collect())
        .collect()
}

pub fn parse_problem(bytes: &[u8]) -> Result<(ProblemFile, BlockOperator), CliError> {
    let file: ProblemFile = serde_json::from_slice(bytes).map_err(|e| CliError::Input(format!("malformed problem file: {e}")))?;
    let a0 = to_matrix("a0", &file.a0)?;
    let a1 = to_matrix("a1", &file.a1)?;
    let v = to_matrix("v", &file.v)?;
    let op = BlockOperator::new(a0, a1, v).map_err(|e| CliError::Input(e.to_string()))?;
    Ok((file, op))
}

pub fn load_problem(path: &Path) -> Result<LoadedProblem, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let (file, op) = parse_problem(&bytes)?;
    Ok(LoadedProblem {
        file,
        op,
        digest: sha256_hex(&bytes),
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
