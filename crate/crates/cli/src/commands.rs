use std::path::PathBuf;

use riccati_core::blockmodel::{check_hypothesis, BlockOperator};
use riccati_core::eigclassify::{classify_all, k_pp_members};
use riccati_core::herglotz::{atom_table, boundary_scan, default_ladder, geometric_ladder, uniform_grid, ScanSettings};
use riccati_core::numkernel::{hermitian_eig, numerical_rank, ComplexMatrix, ToleranceProfile};
use riccati_core::riccati::{
    graph_invariance_defect, oracle_graph_solutions_basis, riccati_residual, solve_existence, ExistenceOutcome,
    NoCertificateReason, SelectionRoute,
};

use crate::problem::{load_problem, Entry, GridSpec, LadderSpec, LoadedProblem};
use crate::report::{
    atom_info, classification_info, oracle_entries, plot_table, HypothesisInfo, InputInfo, OracleInfo, PairInfo,
    ReportFile, ScanInfo, SolutionInfo, SolveInfo, ToleranceInfo,
};
use crate::{CliError, Command, CommonArgs, ScanArgs, SolveArgs, VerifyArgs};
use crate::{EXIT_HYPOTHESIS, EXIT_INPUT, EXIT_NO_CERTIFICATE, EXIT_OK};

/// Largest `d0 + n` for which `--all-oracle` enumerates subsets.
const ORACLE_MAX_DIM: usize = 14;
const DEFAULT_GRID_POINTS: usize = 401;
/// Allowed drift between a recorded and a recomputed residual.
const VERIFY_TOL: f64 = 1e-12;

/// Result of one command: the text to emit and where.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub out: Option<PathBuf>,
    pub plot: Option<(PathBuf, String)>,
    pub exit_code: i32,
    pub report: Option<ReportFile>,
}

pub fn execute(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Check(args) => cmd_check(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn resolve_tolerances(problem: &LoadedProblem, args: &CommonArgs) -> Result<ToleranceProfile, CliError> {
    let mut tol = ToleranceProfile::scaled_to(problem.op.assemble_full().frobenius_norm());
    if let Some(spec) = &problem.file.tolerances {
        tol.eig_cluster_tol = spec.eig.unwrap_or(tol.eig_cluster_tol);
        tol.rank_rtol = spec.rank.unwrap_or(tol.rank_rtol);
        tol.residual_tol = spec.residual.unwrap_or(tol.residual_tol);
    }
    tol.eig_cluster_tol = args.tol_eig.unwrap_or(tol.eig_cluster_tol);
    tol.rank_rtol = args.tol_rank.unwrap_or(tol.rank_rtol);
    tol.residual_tol = args.tol_residual.unwrap_or(tol.residual_tol);
    tol.validate().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(tol)
}

fn base_report(command: &str, problem: &LoadedProblem, tol: &ToleranceProfile, hyp: HypothesisInfo) -> ReportFile {
    ReportFile {
        tool: "riccati".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        input: InputInfo {
            sha256: problem.digest.clone(),
            d0: problem.op.d0(),
            n: problem.op.n(),
        },
        tolerances: ToleranceInfo::from(tol),
        hypothesis: hyp,
        classification: None,
        atoms: None,
        scan: None,
        solve: None,
        status: "ok".into(),
        exit_code: EXIT_OK,
    }
}

fn finish(mut report: ReportFile, status: &str, exit_code: i32, out: Option<PathBuf>) -> Outcome {
    report.status = status.into();
    report.exit_code = exit_code;
    Outcome {
        text: report.to_json(),
        out,
        plot: None,
        exit_code,
        report: Some(report),
    }
}

fn core_err(e: riccati_core::Error) -> CliError {
    CliError::Input(e.to_string())
}

fn cmd_check(args: &CommonArgs) -> Result<Outcome, CliError> {
    let problem = load_problem(&args.input)?;
    let tol = resolve_tolerances(&problem, args)?;
    let hyp = check_hypothesis(&problem.op, &tol);
    let report = base_report("check", &problem, &tol, HypothesisInfo::from(&hyp));
    Ok(if hyp.passed() {
        finish(report, "ok", EXIT_OK, args.out.clone())
    } else {
        finish(report, "hypothesis_failed", EXIT_HYPOTHESIS, args.out.clone())
    })
}

fn cmd_classify(args: &CommonArgs) -> Result<Outcome, CliError> {
    let problem = load_problem(&args.input)?;
    let tol = resolve_tolerances(&problem, args)?;
    let hyp = check_hypothesis(&problem.op, &tol);
    let mut report = base_report("classify", &problem, &tol, HypothesisInfo::from(&hyp));
    report.atoms = Some(atom_info(&atom_table(&problem.op, &tol).map_err(core_err)?));
    if !hyp.passed() {
        return Ok(finish(report, "hypothesis_failed", EXIT_HYPOTHESIS, args.out.clone()));
    }
    let cls = classify_all(&problem.op, &tol).map_err(core_err)?;
    report.classification = Some(classification_info(&cls));
    Ok(finish(report, "ok", EXIT_OK, args.out.clone()))
}

fn parse_triple(flag: &str, text: &str) -> Result<(f64, f64, String), CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Input(format!("--{flag} expects three ':'-separated fields, got {text:?}")));
    }
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Input(format!("--{flag}: {s:?} is not a number")))
    };
    Ok((num(parts[0])?, num(parts[1])?, parts[2].trim().to_string()))
}

fn parse_grid(text: &str) -> Result<GridSpec, CliError> {
    let (min, max, points) = parse_triple("grid", text)?;
    let points = points
        .parse::<usize>()
        .map_err(|_| CliError::Input(format!("--grid: {points:?} is not a point count")))?;
    Ok(GridSpec { min, max, points })
}

fn parse_ladder(text: &str) -> Result<LadderSpec, CliError> {
    let (hi, lo, ratio) = parse_triple("eps-ladder", text)?;
    let ratio = ratio
        .parse::<f64>()
        .map_err(|_| CliError::Input(format!("--eps-ladder: {ratio:?} is not a number")))?;
    Ok(LadderSpec { hi, lo, ratio })
}

/// Uniform grid over the spectrum of `B` with margin, plus the exact atom locations so
/// that irrational eigenvalues are hit.
fn default_grid(op: &BlockOperator, tol: &ToleranceProfile, atoms: &[f64]) -> Result<Vec<f64>, CliError> {
    let eig = hermitian_eig(&op.assemble_full(), tol).map_err(core_err)?;
    let lo = eig.eigenvalues.first().copied().unwrap_or(0.0);
    let hi = eig.eigenvalues.last().copied().unwrap_or(0.0);
    let margin = 0.1 * (hi - lo) + 0.5;
    let mut grid = uniform_grid(lo - margin, hi + margin, DEFAULT_GRID_POINTS).map_err(core_err)?;
    let near = 1e-12 * (1.0 + hi.abs().max(lo.abs()));
    grid.retain(|g| atoms.iter().all(|a| (a - g).abs() > near));
    grid.extend_from_slice(atoms);
    grid.sort_by(f64::total_cmp);
    Ok(grid)
}

fn cmd_scan(args: &ScanArgs) -> Result<Outcome, CliError> {
    let problem = load_problem(&args.common.input)?;
    let tol = resolve_tolerances(&problem, &args.common)?;
    let hyp = check_hypothesis(&problem.op, &tol);
    let atoms = atom_table(&problem.op, &tol).map_err(core_err)?;

    let file_scan = problem.file.scan.clone().unwrap_or_default();
    let grid_spec = match &args.grid {
        Some(text) => Some(parse_grid(text)?),
        None => file_scan.grid,
    };
    let ladder_spec = match &args.eps_ladder {
        Some(text) => Some(parse_ladder(text)?),
        None => file_scan.eps_ladder,
    };
    let grid = match grid_spec {
        Some(g) => uniform_grid(g.min, g.max, g.points).map_err(core_err)?,
        None => default_grid(&problem.op, &tol, &atoms.locations())?,
    };
    let ladder = match ladder_spec {
        Some(l) => geometric_ladder(l.hi, l.lo, l.ratio).map_err(core_err)?,
        None => default_ladder(),
    };

    let scan = boundary_scan(&problem.op, &grid, &ladder, &ScanSettings::default(), &tol).map_err(core_err)?;
    let plot_path = args
        .plot
        .clone()
        .or_else(|| args.common.out.as_ref().map(|p| p.with_extension("tsv")));
    let mut report = base_report("scan", &problem, &tol, HypothesisInfo::from(&hyp));
    report.scan = Some(ScanInfo::new(
        &scan,
        &atoms,
        plot_path.as_ref().map(|p| p.display().to_string()),
    ));
    let mut outcome = finish(report, "ok", EXIT_OK, args.common.out.clone());
    outcome.plot = plot_path.map(|p| (p, plot_table(&scan)));
    Ok(outcome)
}

fn route_label(route: SelectionRoute) -> &'static str {
    match route {
        SelectionRoute::RepeatedEigenvalue => "repeated_eigenvalue",
        SelectionRoute::Greedy => "greedy",
        SelectionRoute::Trivial => "trivial",
    }
}

fn oracle_section(op: &BlockOperator, tol: &ToleranceProfile) -> OracleInfo {
    if op.dim() > ORACLE_MAX_DIM {
        return OracleInfo {
            ran: false,
            skipped_reason: Some(format!("d0 + n = {} exceeds {ORACLE_MAX_DIM}", op.dim())),
            incomplete: true,
            solutions: Vec::new(),
        };
    }
    match oracle_graph_solutions_basis(op, tol) {
        Ok(found) => OracleInfo {
            ran: true,
            skipped_reason: None,
            incomplete: found.incomplete,
            solutions: oracle_entries(&found.solutions, tol),
        },
        Err(e) => OracleInfo {
            ran: false,
            skipped_reason: Some(e.to_string()),
            incomplete: true,
            solutions: Vec::new(),
        },
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<Outcome, CliError> {
    let problem = load_problem(&args.common.input)?;
    let tol = resolve_tolerances(&problem, &args.common)?;
    let op = &problem.op;
    let hyp = check_hypothesis(op, &tol);
    let mut report = base_report("solve", &problem, &tol, HypothesisInfo::from(&hyp));
    let oracle = args.all_oracle.then(|| oracle_section(op, &tol));

    let (info, status, code) = match solve_existence(op, &tol) {
        ExistenceOutcome::Solved(s) => (
            SolveInfo {
                outcome: "solved".into(),
                krylov_rank: s.krylov_rank,
                route: Some(route_label(s.route).into()),
                lambda_set: s.lambda_set.as_ref().map(|set| {
                    set.pairs()
                        .iter()
                        .map(|p| PairInfo {
                            lambda: p.lambda,
                            y: p.y.iter().map(|&z| Entry::from_value(z)).collect(),
                        })
                        .collect()
                }),
                solution: Some(SolutionInfo::new(&s.solution, &tol)),
                reason: None,
                k_pp_count: None,
                witness_rank: None,
                oracle,
            },
            "ok",
            EXIT_OK,
        ),
        ExistenceOutcome::NoCertificate(nc) => {
            let kpp = k_pp_members(&nc.classifications);
            let witness_rank = if kpp.is_empty() {
                0
            } else {
                let cols: Vec<_> = kpp.iter().map(|p| p.y.clone()).collect();
                numerical_rank(&ComplexMatrix::from_columns(op.n(), &cols), &tol)
            };
            let reason = match &nc.reason {
                NoCertificateReason::InsufficientWitnesses { available, rank } => format!(
                    "{available} regular witnesses span a {rank}-dimensional subspace of H1, {} needed",
                    nc.n
                ),
                NoCertificateReason::VerificationFailed { residual, bound } => {
                    format!("selected witnesses gave residual {residual:e} above {bound:e}")
                }
                NoCertificateReason::Numerical(e) => format!("numerical failure: {e}"),
            };
            report.classification = Some(classification_info(&nc.classifications));
            (
                SolveInfo {
                    outcome: "no_certificate".into(),
                    krylov_rank: nc.krylov_rank,
                    route: None,
                    lambda_set: None,
                    solution: None,
                    reason: Some(reason),
                    k_pp_count: Some(kpp.len()),
                    witness_rank: Some(witness_rank),
                    oracle,
                },
                "no_certificate",
                EXIT_NO_CERTIFICATE,
            )
        }
    };
    report.solve = Some(info);
    Ok(finish(report, status, code, args.common.out.clone()))
}

fn entries_to_matrix(rows: &[Vec<Entry>], d0: usize, n: usize) -> Result<ComplexMatrix, CliError> {
    let rows: Vec<Vec<_>> = rows.iter().map(|r| r.iter().map(|e| e.value()).collect()).collect();
    if rows.is_empty() && n * d0 == 0 {
        return Ok(ComplexMatrix::zeros(n, d0));
    }
    ComplexMatrix::try_from_rows(&rows).map_err(|e| CliError::Input(format!("recorded X: {e}")))
}

fn cmd_verify(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let problem = load_problem(&args.input)?;
    let text = std::fs::read_to_string(&args.report)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", args.report.display())))?;
    let report: ReportFile =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("malformed report: {e}")))?;
    if report.input.sha256 != problem.digest {
        return Err(CliError::Input("report was produced from a different input file".into()));
    }
    let op = &problem.op;
    let mut recorded: Vec<&SolutionInfo> = Vec::new();
    if let Some(solve) = &report.solve {
        recorded.extend(solve.solution.iter());
        if let Some(oracle) = &solve.oracle {
            recorded.extend(oracle.solutions.iter().map(|o| &o.solution));
        }
    }
    let mut worst: f64 = 0.0;
    for s in &recorded {
        let x = entries_to_matrix(&s.x, op.d0(), op.n())?;
        let residual = riccati_residual(op, &x).map_err(core_err)?;
        let defect = graph_invariance_defect(op, &x).map_err(core_err)?;
        worst = worst
            .max((residual - s.residual).abs() / s.residual.max(1.0))
            .max((defect - s.graph_defect).abs() / s.graph_defect.max(1.0));
    }
    let ok = worst <= VERIFY_TOL;
    let summary = serde_json::json!({
        "checked": recorded.len(),
        "max_deviation": worst,
        "ok": ok,
    });
    Ok(Outcome {
        text: format!("{}\n", serde_json::to_string_pretty(&summary).expect("summary is serialisable")),
        out: None,
        plot: None,
        exit_code: if ok { EXIT_OK } else { EXIT_INPUT },
        report: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_flag_parsing() {
        assert_eq!(
            parse_grid("-2:2:401").unwrap(),
            GridSpec {
                min: -2.0,
                max: 2.0,
                points: 401
            }
        );
        assert!(parse_grid("-2:2").is_err());
        assert!(parse_grid("a:2:3").is_err());
        assert!(parse_grid("0:1:-3").is_err());
    }

    #[test]
    fn ladder_flag_parsing() {
        let l = parse_ladder("1e-2:1e-8:10").unwrap();
        assert_eq!((l.hi, l.lo, l.ratio), (1e-2, 1e-8, 10.0));
        assert!(parse_ladder("1e-2:1e-8").is_err());
    }
}
