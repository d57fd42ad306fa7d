use riccati_core::blockmodel::HypothesisReport;
use riccati_core::eigclassify::EigenvalueClassification;
use riccati_core::herglotz::{AtomTable, ScanReport};
use riccati_core::numkernel::ToleranceProfile;
use riccati_core::riccati::{GraphSolution, RiccatiSolution};
use riccati_core::Complex64;
use serde::{Deserialize, Serialize};

use crate::problem::{matrix_rows, Entry};

fn entries(v: &[Complex64]) -> Vec<Entry> {
    v.iter().map(|&z| Entry::from_value(z)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputInfo {
    pub sha256: String,
    pub d0: usize,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceInfo {
    pub eig: f64,
    pub rank: f64,
    pub residual: f64,
}

impl From<&ToleranceProfile> for ToleranceInfo {
    fn from(t: &ToleranceProfile) -> Self {
        Self {
            eig: t.eig_cluster_tol,
            rank: t.rank_rtol,
            residual: t.residual_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisInfo {
    pub hermitian_ok: bool,
    pub cyclic_ok: bool,
    pub krylov_rank: usize,
    pub d0: usize,
    pub n: usize,
    pub smallest_accepted: f64,
    pub largest_rejected: f64,
}

impl From<&HypothesisReport> for HypothesisInfo {
    fn from(h: &HypothesisReport) -> Self {
        Self {
            hermitian_ok: h.hermitian_ok,
            cyclic_ok: h.cyclic_ok,
            krylov_rank: h.krylov_rank,
            d0: h.d0,
            n: h.n,
            smallest_accepted: h.smallest_accepted,
            largest_rejected: h.largest_rejected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessInfo {
    pub case: String,
    pub y: Vec<Entry>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x: Option<Vec<Entry>>,
    pub in_k_pp: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationInfo {
    pub lambda: f64,
    pub multiplicity: usize,
    pub in_spec_a0: bool,
    /// Set when some witness is `CASE_III`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
    pub witnesses: Vec<WitnessInfo>,
}

pub fn classification_info(cls: &[EigenvalueClassification]) -> Vec<ClassificationInfo> {
    cls.iter()
        .map(|c| ClassificationInfo {
            lambda: c.lambda,
            multiplicity: c.multiplicity,
            in_spec_a0: c.in_spec_a0,
            note: c.has_case_iii().then(|| "CASE_III: excluded from K_pp".to_string()),
            witnesses: c
                .witnesses
                .iter()
                .map(|w| WitnessInfo {
                    case: w.tag.label().to_string(),
                    y: entries(&w.y),
                    x: w.x.as_deref().map(entries),
                    in_k_pp: w.in_k_pp,
                    residual: w.residual,
                })
                .collect(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomInfo {
    pub lambda: f64,
    pub mass: f64,
}

pub fn atom_info(table: &AtomTable) -> Vec<AtomInfo> {
    table
        .entries
        .iter()
        .map(|a| AtomInfo {
            lambda: a.lambda,
            mass: a.mass,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanInfo {
    pub grid_points: usize,
    pub grid_min: f64,
    pub grid_max: f64,
    pub eps_ladder: Vec<f64>,
    pub flagged_singular: Vec<f64>,
    pub flagged_atoms: Vec<AtomInfo>,
    pub singular_continuous: Vec<f64>,
    /// Exact atoms from the eigendecomposition, for comparison.
    pub atom_table: Vec<AtomInfo>,
    pub total_mass: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub plot_file: Option<String>,
}

impl ScanInfo {
    pub fn new(scan: &ScanReport, atoms: &AtomTable, plot_file: Option<String>) -> Self {
        Self {
            grid_points: scan.grid.len(),
            grid_min: scan.grid.iter().copied().fold(f64::INFINITY, f64::min),
            grid_max: scan.grid.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            eps_ladder: scan.eps_ladder.clone(),
            flagged_singular: scan.flagged_singular.clone(),
            flagged_atoms: scan
                .flagged_atoms
                .iter()
                .map(|&(lambda, mass)| AtomInfo { lambda, mass })
                .collect(),
            singular_continuous: scan.singular_continuous.clone(),
            atom_table: atom_info(atoms),
            total_mass: atoms.total_mass(),
            plot_file,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairInfo {
    pub lambda: f64,
    pub y: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionInfo {
    pub x: Vec<Vec<Entry>>,
    pub residual: f64,
    pub residual_bound: f64,
    pub graph_defect: f64,
    pub graph_defect_bound: f64,
    pub bounded: bool,
}

impl SolutionInfo {
    pub fn new(s: &RiccatiSolution, tol: &ToleranceProfile) -> Self {
        Self {
            x: matrix_rows(&s.x),
            residual: s.residual,
            residual_bound: tol.residual_tol * s.residual_scale,
            graph_defect: s.graph_defect,
            graph_defect_bound: tol.residual_tol * s.operator_norm,
            bounded: s.bounded,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleEntry {
    pub subset: Vec<usize>,
    pub eigenvalues: Vec<f64>,
    pub solution: SolutionInfo,
}

pub fn oracle_entries(list: &[GraphSolution], tol: &ToleranceProfile) -> Vec<OracleEntry> {
    list.iter()
        .map(|g| OracleEntry {
            subset: g.subset.clone(),
            eigenvalues: g.eigenvalues.clone(),
            solution: SolutionInfo::new(&g.solution, tol),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleInfo {
    pub ran: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub skipped_reason: Option<String>,
    /// True when repeated eigenvalues limited the enumeration to one eigenbasis.
    pub incomplete: bool,
    pub solutions: Vec<OracleEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveInfo {
    /// `solved` or `no_certificate`.
    pub outcome: String,
    pub krylov_rank: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub route: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda_set: Option<Vec<PairInfo>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub solution: Option<SolutionInfo>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k_pp_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle: Option<OracleInfo>,
}

/// Everything a command writes. Sections a command does not produce are omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub input: InputInfo,
    pub tolerances: ToleranceInfo,
    pub hypothesis: HypothesisInfo,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub classification: Option<Vec<ClassificationInfo>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub atoms: Option<Vec<AtomInfo>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scan: Option<ScanInfo>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub solve: Option<SolveInfo>,
    pub status: String,
    pub exit_code: i32,
}

impl ReportFile {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serialisable");
        s.push('\n');
        s
    }
}

/// Tab-separated `lambda eps trace_im_m` rows, one per grid point and rung.
pub fn plot_table(scan: &ScanReport) -> String {
    let mut out = String::from("lambda\teps\ttrace_im_m\n");
    for (lambda, row) in scan.grid.iter().zip(&scan.trace_im_values) {
        for (eps, v) in scan.eps_ladder.iter().zip(row) {
            out.push_str(&format!("{lambda:?}\t{eps:?}\t{v:?}\n"));
        }
    }
    out
}
