//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::Rng;
use riccati_core::blockmodel::{check_hypothesis, multiplicity_of_spectrum, BlockOperator};
use riccati_core::eigclassify::{classify_all, k_pp_members, CaseTag};
use riccati_core::herglotz::{
    atom_table, boundary_scan, default_ladder, m_resolvent, m_schur, uniform_grid, HerglotzSample, ScanSettings,
};
use riccati_core::numkernel::{hermitian_eig, numerical_rank, ComplexMatrix, ToleranceProfile};
use riccati_core::riccati::{
    build_lambda, build_x_lambda, oracle_graph_solutions, solve_existence, ExistenceOutcome, LambdaPair,
    RiccatiSolution, SelectionRoute,
};
use riccati_core::testing::{
    example_3_3, hermitian_with_spectrum, operator_with_multiplicity_n, pauli_fixture, random_block_operator,
    random_complex, random_upper_half_plane, rng, scalar_fixture, structured_block_operator, TestRng,
};
use riccati_core::Complex64;

type Check = Result<String, String>;

fn t() -> ToleranceProfile {
    ToleranceProfile::default()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: &[Complex64], b: &[f64], eps: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, &y)| (x - Complex64::new(y, 0.0)).norm() <= eps)
}

fn max_entry_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn criterion_1() -> Check {
    let cls = classify_all(&example_3_3(), &t()).map_err(|e| e.to_string())?;
    ensure(cls.len() == 4, || format!("{} clusters", cls.len()))?;
    let (one, others): (Vec<_>, Vec<_>) = cls.iter().partition(|c| (c.lambda - 1.0).abs() <= 1e-8);
    ensure(one.len() == 1, || "no cluster at lambda = 1".into())?;
    let w = &one[0].witnesses;
    ensure(w.len() == 1 && w[0].tag == CaseTag::CaseIII, || format!("lambda = 1 witnesses {w:?}"))?;
    ensure(close(&w[0].y, &[0.0, 1.0], 1e-8), || format!("y = {:?}", w[0].y))?;
    let x = w[0].x.as_ref().ok_or("missing x")?;
    ensure(close(x, &[-1.0, 0.0], 1e-8), || format!("x = {x:?}"))?;
    ensure(
        others.iter().all(|c| c.witnesses.iter().all(|w| w.tag == CaseTag::CaseI)),
        || "a remaining eigenvalue is not CASE_I".into(),
    )?;
    let lambdas: Vec<String> = others.iter().map(|c| format!("{:.6}", c.lambda)).collect();
    Ok(format!("CASE_III at 1 with y=(0,1), x=(-1,0); CASE_I at {}", lambdas.join(", ")))
}

/// Cyclic instance drawn from one of three families: dense random, repeated spectra in
/// both diagonal blocks, and an eigenvalue of `B` of multiplicity exactly `n`.
fn multiplicity_instance(r: &mut TestRng) -> BlockOperator {
    let d0 = r.gen_range(1..=12);
    let n = r.gen_range(1..=4);
    match r.gen_range(0..3) {
        0 => random_block_operator(r, d0, n),
        1 => {
            let a0_vals: Vec<f64> = (0..d0).map(|_| r.gen_range(-2i32..=2) as f64).collect();
            let a1_vals: Vec<f64> = (0..n).map(|_| r.gen_range(-2i32..=2) as f64).collect();
            let a0 = hermitian_with_spectrum(r, &a0_vals);
            let v = random_complex(r, d0, n);
            BlockOperator::new(a0, ComplexMatrix::from_diagonal(&a1_vals), v).unwrap()
        }
        _ => {
            let lambda = r.gen_range(-1.0..1.0);
            operator_with_multiplicity_n(r, d0, n, lambda)
        }
    }
}

fn criterion_2() -> Check {
    let mut r = rng(2002);
    let (mut cyclic, mut drawn, mut saturated) = (0, 0, 0);
    while cyclic < 500 {
        drawn += 1;
        ensure(drawn < 50_000, || "could not draw 500 cyclic instances".into())?;
        let op = multiplicity_instance(&mut r);
        if !check_hypothesis(&op, &t()).cyclic_ok {
            continue;
        }
        cyclic += 1;
        let m = multiplicity_of_spectrum(&op.assemble_full(), &t()).map_err(|e| e.to_string())?;
        ensure(m <= op.n(), || format!("multiplicity {m} > n = {} for {op:?}", op.n()))?;
        if m == op.n() && m > 1 {
            saturated += 1;
        }
    }
    Ok(format!("500 cyclic of {drawn} drawn, 0 violations, {saturated} with multiplicity exactly n > 1"))
}

fn herglotz_samples() -> Vec<(BlockOperator, Complex64)> {
    let mut r = rng(2003);
    (0..200)
        .map(|_| {
            let d0 = r.gen_range(1..=8);
            let n = r.gen_range(1..=4);
            let op = if r.gen_bool(0.5) {
                random_block_operator(&mut r, d0, n)
            } else {
                structured_block_operator(&mut r, d0, n)
            };
            let z = random_upper_half_plane(&mut r, 3.0, 1e-3, 10.0);
            (op, z)
        })
        .collect()
}

fn criterion_3() -> Check {
    let mut worst: f64 = 0.0;
    for (op, z) in herglotz_samples() {
        let a = m_resolvent(&op, z, &t()).map_err(|e| e.to_string())?;
        let b = m_schur(&op, z, &t()).map_err(|e| e.to_string())?;
        let rel = (&a - &b).frobenius_norm() / a.frobenius_norm();
        worst = worst.max(rel);
        ensure(rel <= 1e-9, || format!("relative gap {rel:e} at z = {z}"))?;
    }
    Ok(format!("200 samples, worst relative gap {worst:.2e}"))
}

fn criterion_4() -> Check {
    let mut lowest = f64::INFINITY;
    for (op, z) in herglotz_samples() {
        let s = HerglotzSample::evaluate(&op, z, &t()).map_err(|e| e.to_string())?;
        let m = s.min_imaginary_eigenvalue(&t()).map_err(|e| e.to_string())?;
        lowest = lowest.min(m);
        ensure(m >= -1e-12, || format!("min eigenvalue of Im M = {m:e} at z = {z}"))?;
    }
    Ok(format!("200 samples, smallest eigenvalue of Im M(z) {lowest:.2e}"))
}

fn scan_masses(op: &BlockOperator, grid: &[f64]) -> Result<usize, String> {
    let report = boundary_scan(op, grid, &default_ladder(), &ScanSettings::default(), &t()).map_err(|e| e.to_string())?;
    let atoms = atom_table(op, &t()).map_err(|e| e.to_string())?;
    ensure(report.flagged_atoms.len() == atoms.entries.len(), || {
        format!("scan flagged {:?}, expected {:?}", report.flagged_atoms, atoms.locations())
    })?;
    for ((lambda, mass), atom) in report.flagged_atoms.iter().zip(&atoms.entries) {
        ensure((lambda - atom.lambda).abs() <= t().eig_cluster_tol, || format!("atom at {lambda} vs {}", atom.lambda))?;
        let rel = (mass - atom.mass).abs() / atom.mass;
        ensure(rel <= 0.05, || format!("mass {mass} vs {} at {lambda}", atom.mass))?;
    }
    Ok(report.flagged_atoms.len())
}

fn criterion_5() -> Check {
    let mut r = rng(2005);
    let mut count = 0;
    while count < 100 {
        let d0 = r.gen_range(1..=6);
        let n = r.gen_range(1..=3);
        let op = if r.gen_bool(0.5) {
            random_block_operator(&mut r, d0, n)
        } else {
            structured_block_operator(&mut r, d0, n)
        };
        if !check_hypothesis(&op, &t()).cyclic_ok {
            continue;
        }
        count += 1;
        let atoms = atom_table(&op, &t()).map_err(|e| e.to_string())?;
        let clusters = hermitian_eig(&op.assemble_full(), &t()).map_err(|e| e.to_string())?.clusters(&t());
        let locs = atoms.locations();
        ensure(locs.len() == clusters.len(), || format!("{} atoms vs {} clusters", locs.len(), clusters.len()))?;
        for (l, c) in locs.iter().zip(&clusters) {
            ensure((l - c.value).abs() <= t().eig_cluster_tol, || format!("atom {l} vs eigenvalue {}", c.value))?;
        }
        let total = atoms.total_mass();
        ensure((total - n as f64).abs() <= 1e-8, || format!("total mass {total} for n = {n}"))?;
    }
    let pauli = scan_masses(&pauli_fixture(), &uniform_grid(-2.0, 2.0, 401).map_err(|e| e.to_string())?)?;
    let s2 = 2f64.sqrt();
    let scalar = scan_masses(&scalar_fixture(), &[-s2, -1.0, 0.0, 1.0, s2])?;
    Ok(format!(
        "100 cyclic instances match clusters with total mass n; scan recovers {pauli} masses 1/2 at +-1 and {scalar} at +-sqrt 2"
    ))
}

fn usable_pairs(op: &BlockOperator) -> Result<Vec<LambdaPair>, String> {
    let cls = classify_all(op, &t()).map_err(|e| e.to_string())?;
    Ok(k_pp_members(&cls).into_iter().map(|p| LambdaPair::new(p.y, p.lambda)).collect())
}

/// Every `X_Λ` over all `n`-subsets of regular witnesses with independent `y`.
fn all_x_lambda(op: &BlockOperator, pairs: &[LambdaPair]) -> Result<Vec<RiccatiSolution>, String> {
    let mut out = Vec::new();
    for choice in pairs.iter().cloned().combinations(op.n()) {
        let ys: Vec<_> = choice.iter().map(|p| p.y.clone()).collect();
        if numerical_rank(&ComplexMatrix::from_columns(op.n(), &ys), &t()) < op.n() {
            continue;
        }
        let set = build_lambda(op, &choice, &t()).map_err(|e| e.to_string())?;
        out.push(build_x_lambda(op, &set, &t()).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

fn criterion_6() -> Check {
    let mut r = rng(2006);
    let (mut instances, mut built) = (0, 0);
    while instances < 200 {
        let d0 = r.gen_range(1..=6);
        let n = r.gen_range(1..=3);
        let op = if r.gen_bool(0.5) {
            random_block_operator(&mut r, d0, n)
        } else {
            structured_block_operator(&mut r, d0, n)
        };
        if !check_hypothesis(&op, &t()).cyclic_ok {
            continue;
        }
        let pairs = usable_pairs(&op)?;
        let ys: Vec<_> = pairs.iter().map(|p| p.y.clone()).collect();
        if ys.len() < n || numerical_rank(&ComplexMatrix::from_columns(n, &ys), &t()) < n {
            continue;
        }
        instances += 1;
        for sol in all_x_lambda(&op, &pairs)? {
            built += 1;
            ensure(sol.residual <= 1e-8 * sol.residual_scale, || {
                format!("residual {:e} above {:e}", sol.residual, 1e-8 * sol.residual_scale)
            })?;
            ensure(sol.graph_defect <= 1e-8 * sol.operator_norm, || {
                format!("graph defect {:e} above {:e}", sol.graph_defect, 1e-8 * sol.operator_norm)
            })?;
        }
    }
    Ok(format!("200 instances, {built} X_Λ all within residual and graph-defect bounds"))
}

fn criterion_7() -> Check {
    let mut r = rng(2007);
    let (mut instances, mut matched) = (0, 0);
    while instances < 100 {
        let n = r.gen_range(1..=3);
        let d0 = r.gen_range(1..=10 - n);
        let op = random_block_operator(&mut r, d0, n);
        let eig = hermitian_eig(&op.assemble_full(), &t()).map_err(|e| e.to_string())?;
        if eig.max_multiplicity(&t()) > 1 {
            continue;
        }
        instances += 1;
        let oracle = oracle_graph_solutions(&op, &t()).map_err(|e| e.to_string())?;
        let pairs = usable_pairs(&op)?;
        for choice in pairs.into_iter().combinations(n) {
            let Ok(set) = build_lambda(&op, &choice, &t()) else { continue };
            let sol = build_x_lambda(&op, &set, &t()).map_err(|e| e.to_string())?;
            let hit = oracle
                .iter()
                .find(|g| max_entry_distance(&g.solution.x, &sol.x) <= 1e-6)
                .ok_or_else(|| format!("X_Λ for {:?} not among {} oracle solutions", set.lambdas(), oracle.len()))?;
            ensure(hit.eigenvalues.len() + set.len() == op.dim(), || "subset sizes do not add up".into())?;
            ensure(
                set.lambdas().iter().all(|l| hit.eigenvalues.iter().all(|m| (m - l).abs() > 1e-8)),
                || "graph subset shares an eigenvalue with Λ".into(),
            )?;
            matched += 1;
        }
    }
    let s2 = 2f64.sqrt();
    let mut roots: Vec<f64> = oracle_graph_solutions(&scalar_fixture(), &t())
        .map_err(|e| e.to_string())?
        .iter()
        .map(|g| g.solution.x[(0, 0)].re)
        .collect();
    roots.sort_by(f64::total_cmp);
    ensure(roots.len() == 2, || format!("scalar oracle returned {roots:?}"))?;
    ensure((roots[0] - (1.0 - s2)).abs() <= 1e-10 && (roots[1] - (1.0 + s2)).abs() <= 1e-10, || {
        format!("scalar roots {roots:?}")
    })?;
    Ok(format!("100 instances, {matched} X_Λ matched; scalar oracle gives exactly 1 -+ sqrt 2"))
}

fn criterion_8() -> Check {
    let mut r = rng(2008);
    let (mut instances, mut drawn) = (0, 0);
    let mut worst: f64 = 0.0;
    while instances < 100 {
        drawn += 1;
        let d0 = r.gen_range(1..=6);
        let n = r.gen_range(1..=3);
        let op = if r.gen_bool(0.5) {
            random_block_operator(&mut r, d0, n)
        } else {
            structured_block_operator(&mut r, d0, n)
        };
        let eb = hermitian_eig(&op.assemble_full(), &t()).map_err(|e| e.to_string())?;
        let ea = hermitian_eig(op.a0(), &t()).map_err(|e| e.to_string())?;
        if eb.eigenvalues.iter().any(|&l| ea.distance_to_spectrum(l) < 1e-3) {
            continue;
        }
        instances += 1;
        let ExistenceOutcome::Solved(s) = solve_existence(&op, &t()) else {
            return Err(format!("no certificate for a disjoint-spectrum instance {op:?}"));
        };
        worst = worst.max(s.solution.residual);
        ensure(s.solution.residual <= 1e-8 && s.solution.verified(&t()), || {
            format!("residual {:e}", s.solution.residual)
        })?;
    }
    Ok(format!("100/100 solved ({drawn} drawn), worst residual {worst:.2e}"))
}

fn criterion_9() -> Check {
    let mut r = rng(2009);
    for k in 0..20 {
        let n = r.gen_range(2..=4);
        let d0 = r.gen_range(1..=6);
        let lambda = r.gen_range(-1.5..1.5);
        let op = operator_with_multiplicity_n(&mut r, d0, n, lambda);
        let m = multiplicity_of_spectrum(&op.assemble_full(), &t()).map_err(|e| e.to_string())?;
        ensure(m == n, || format!("instance {k}: multiplicity {m}, n = {n}"))?;
        let ExistenceOutcome::Solved(s) = solve_existence(&op, &t()) else {
            return Err(format!("instance {k}: no certificate"));
        };
        ensure(s.route == SelectionRoute::RepeatedEigenvalue, || format!("instance {k}: route {:?}", s.route))?;
        let set = s.lambda_set.as_ref().ok_or("missing Λ")?;
        ensure(set.len() == n, || format!("instance {k}: |Λ| = {}", set.len()))?;
        let single = set.single_lambda(1e-8).ok_or_else(|| format!("instance {k}: Λ uses {:?}", set.lambdas()))?;
        ensure((single - lambda).abs() <= 1e-8, || format!("instance {k}: λ = {single}, built with {lambda}"))?;
        ensure(s.solution.verified(&t()), || format!("instance {k}: residual {:e}", s.solution.residual))?;
    }
    Ok("20/20 solved, each Λ a single λ repeated n times".into())
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run_cli(args: &[&str]) -> Result<(i32, Vec<u8>, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_riccati"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), out.stdout, out.stderr))
}

fn criterion_10() -> Check {
    let ex = fixture("example33.json");
    let ex = ex.to_str().unwrap();
    let (c1, a, _) = run_cli(&["solve", ex])?;
    let (c2, b, _) = run_cli(&["solve", ex])?;
    ensure(c1 == 0 && c2 == 0, || format!("solve exit codes {c1}, {c2}"))?;
    ensure(!a.is_empty() && a == b, || "stdout reports differ".into())?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p1 = dir.path().join("one.json");
    let p2 = dir.path().join("two.json");
    run_cli(&["solve", ex, "--out", p1.to_str().unwrap()])?;
    run_cli(&["solve", ex, "--out", p2.to_str().unwrap()])?;
    let f1 = std::fs::read(&p1).map_err(|e| e.to_string())?;
    let f2 = std::fs::read(&p2).map_err(|e| e.to_string())?;
    ensure(f1 == f2 && f1 == a, || "report files differ".into())?;

    let malformed = ["malformed_syntax.json", "malformed_ragged.json", "malformed_shape.json"];
    for name in malformed {
        let path = fixture(name);
        for cmd in ["check", "classify", "scan", "solve"] {
            let (code, stdout, stderr) = run_cli(&[cmd, path.to_str().unwrap()])?;
            ensure(code == 1, || format!("{cmd} {name}: exit {code}"))?;
            ensure(stdout.is_empty() && !stderr.is_empty(), || format!("{cmd} {name}: diagnostics missing"))?;
        }
    }
    let contract = [
        ("check", "noncyclic.json", 2),
        ("check", "nonhermitian.json", 1),
        ("solve", "no_certificate.json", 3),
        ("solve", "scalar.json", 0),
    ];
    for (cmd, name, want) in contract {
        let (code, _, _) = run_cli(&[cmd, fixture(name).to_str().unwrap()])?;
        ensure(code == want, || format!("{cmd} {name}: exit {code}, expected {want}"))?;
    }
    Ok("two solve runs byte-identical; 3 malformed fixtures exit 1 under every command".into())
}

fn main() {
    type Criterion = (u32, &'static str, fn() -> Check, Option<Duration>);
    let criteria: [Criterion; 10] = [
        (1, "example classification", criterion_1, Some(Duration::from_secs(1))),
        (2, "spectral multiplicity bound", criterion_2, Some(Duration::from_secs(30))),
        (3, "resolvent and Schur forms agree", criterion_3, Some(Duration::from_secs(10))),
        (4, "Herglotz positivity", criterion_4, None),
        (5, "atoms and scan masses", criterion_5, None),
        (6, "X_Λ strong solutions", criterion_6, None),
        (7, "oracle equivalence", criterion_7, None),
        (8, "disjoint spectra always solvable", criterion_8, Some(Duration::from_secs(60))),
        (9, "single repeated eigenvalue", criterion_9, None),
        (10, "CLI determinism and exit codes", criterion_10, None),
    ];
    let mut failed = 0;
    for (id, name, run, limit) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let result = match (result, limit) {
            (Ok(_), Some(l)) if elapsed > l => Err(format!("took {:.2}s, limit {}s", elapsed.as_secs_f64(), l.as_secs())),
            (r, _) => r,
        };
        let (verdict, detail) = match result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {id:>2} {verdict} {name}: {detail} [{:.2}s]", elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
