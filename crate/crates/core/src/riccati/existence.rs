use crate::blockmodel::{check_hypothesis, BlockOperator};
use crate::eigclassify::{classify_all, EigenvalueClassification, KppPair};
use crate::numkernel::{hermitian_eig, numerical_rank, singular_values, ComplexMatrix, ToleranceProfile};
use crate::Error;

use super::lambda::build_lambda_with;
use super::{build_x_lambda, LambdaPair, LambdaSet, RiccatiSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionRoute {
    /// All witnesses of one eigenvalue of multiplicity `n`.
    RepeatedEigenvalue,
    /// Greedy selection over all regular witnesses followed by a swap pass.
    Greedy,
    /// `Ran V` is trivial, `X = 0`.
    Trivial,
}

#[derive(Debug, Clone)]
pub struct Solved {
    /// Solution on the full `H0`.
    pub solution: RiccatiSolution,
    pub route: SelectionRoute,
    /// `dim K0`; smaller than `d0` when the problem was restricted to `K0` first.
    pub krylov_rank: usize,
    /// Witnesses used, expressed for the (possibly restricted) problem.
    pub lambda_set: Option<LambdaSet>,
}

#[derive(Debug, Clone)]
pub enum NoCertificateReason {
    /// Fewer than `n` independent regular witnesses.
    InsufficientWitnesses { available: usize, rank: usize },
    /// A selection was built but failed verification.
    VerificationFailed { residual: f64, bound: f64 },
    Numerical(Error),
}

/// Evidence that no selection rule applied. Not a claim that no solution exists.
#[derive(Debug, Clone)]
pub struct NoCertificate {
    pub reason: NoCertificateReason,
    pub krylov_rank: usize,
    pub n: usize,
    pub classifications: Vec<EigenvalueClassification>,
}

#[derive(Debug, Clone)]
pub enum ExistenceOutcome {
    Solved(Box<Solved>),
    NoCertificate(Box<NoCertificate>),
}

impl ExistenceOutcome {
    pub fn solved(&self) -> Option<&Solved> {
        match self {
            ExistenceOutcome::Solved(s) => Some(s),
            ExistenceOutcome::NoCertificate(_) => None,
        }
    }
}

/// Looks for a bounded solution.
///
/// When `Ran V` is not cyclic the problem is solved on `K0` and `X` is extended by zero on
/// its orthogonal complement. An eigenvalue carrying `n` regular witnesses is used on its
/// own; otherwise regular witnesses are picked greedily by `|lambda|` and improved by one
/// swap pass maximising the smallest singular value of `Y`.
pub fn solve_existence(op: &BlockOperator, tol: &ToleranceProfile) -> ExistenceOutcome {
    let hyp = check_hypothesis(op, tol);
    let krylov_rank = hyp.krylov_rank;
    let fail = |reason, classifications| {
        ExistenceOutcome::NoCertificate(Box::new(NoCertificate {
            reason,
            krylov_rank,
            n: op.n(),
            classifications,
        }))
    };

    if krylov_rank == 0 {
        return match RiccatiSolution::evaluate(op, ComplexMatrix::zeros(op.n(), op.d0()), None) {
            Ok(solution) if solution.verified(tol) => ExistenceOutcome::Solved(Box::new(Solved {
                solution,
                route: SelectionRoute::Trivial,
                krylov_rank,
                lambda_set: None,
            })),
            Ok(solution) => fail(
                NoCertificateReason::VerificationFailed {
                    residual: solution.residual,
                    bound: tol.residual_tol * solution.residual_scale,
                },
                Vec::new(),
            ),
            Err(e) => fail(NoCertificateReason::Numerical(e), Vec::new()),
        };
    }

    let q = &hyp.krylov_basis;
    let restricted = if hyp.cyclic_ok {
        op.clone()
    } else {
        match op.restrict(q) {
            Ok(r) => r,
            Err(e) => return fail(NoCertificateReason::Numerical(e), Vec::new()),
        }
    };
    let classifications = match classify_all(&restricted, tol) {
        Ok(c) => c,
        Err(e) => return fail(NoCertificateReason::Numerical(e), Vec::new()),
    };

    let (route, set) = match select(&restricted, &classifications, tol) {
        Ok(v) => v,
        Err(reason) => return fail(reason, classifications),
    };
    let partial = match build_x_lambda(&restricted, &set, tol) {
        Ok(s) => s,
        Err(e) => return fail(NoCertificateReason::Numerical(e), classifications),
    };
    let x = if hyp.cyclic_ok { partial.x } else { &partial.x * &q.adjoint() };
    match RiccatiSolution::evaluate(op, x, Some(set.clone())) {
        Ok(solution) if solution.verified(tol) => ExistenceOutcome::Solved(Box::new(Solved {
            solution,
            route,
            krylov_rank,
            lambda_set: Some(set),
        })),
        Ok(solution) => fail(
            NoCertificateReason::VerificationFailed {
                residual: solution.residual,
                bound: tol.residual_tol * solution.residual_scale,
            },
            classifications,
        ),
        Err(e) => fail(NoCertificateReason::Numerical(e), classifications),
    }
}

fn smallest_singular(cols: &[&[num_complex::Complex64]], n: usize) -> f64 {
    let m = ComplexMatrix::from_columns(n, &cols.iter().map(|c| c.to_vec()).collect::<Vec<_>>());
    singular_values(&m).last().copied().unwrap_or(0.0)
}

fn select(
    op: &BlockOperator,
    classifications: &[EigenvalueClassification],
    tol: &ToleranceProfile,
) -> std::result::Result<(SelectionRoute, LambdaSet), NoCertificateReason> {
    let n = op.n();
    let a0_eig = hermitian_eig(op.a0(), tol).map_err(NoCertificateReason::Numerical)?;
    let build = |pairs: &[LambdaPair]| build_lambda_with(op, &a0_eig, pairs, tol);

    // |lambda| ascending; ties within the clustering radius go to the larger lambda
    let quantum = tol.eig_cluster_tol.max(f64::MIN_POSITIVE);
    let order = |a: f64, b: f64| {
        let ka = (a.abs() / quantum).round();
        let kb = (b.abs() / quantum).round();
        ka.total_cmp(&kb).then(b.total_cmp(&a))
    };

    let mut repeated: Vec<&EigenvalueClassification> = classifications
        .iter()
        .filter(|c| n > 1 && c.witnesses.iter().filter(|w| w.in_k_pp).count() >= n)
        .collect();
    repeated.sort_by(|a, b| order(a.lambda, b.lambda));
    for c in repeated {
        let pairs: Vec<LambdaPair> = c
            .witnesses
            .iter()
            .filter(|w| w.in_k_pp)
            .take(n)
            .map(|w| LambdaPair::new(w.y.clone(), c.lambda))
            .collect();
        if let Ok(set) = build(&pairs) {
            return Ok((SelectionRoute::RepeatedEigenvalue, set));
        }
    }

    let mut candidates: Vec<KppPair> = crate::eigclassify::k_pp_members(classifications);
    candidates.sort_by(|a, b| order(a.lambda, b.lambda));

    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    for (i, c) in candidates.iter().enumerate() {
        if chosen.len() == n {
            break;
        }
        let mut cols: Vec<&[num_complex::Complex64]> = chosen.iter().map(|&j| candidates[j].y.as_slice()).collect();
        cols.push(&c.y);
        if smallest_singular(&cols, n) > tol.rank_rtol {
            chosen.push(i);
        }
    }
    if chosen.len() < n {
        let all: Vec<Vec<num_complex::Complex64>> = candidates.iter().map(|c| c.y.clone()).collect();
        let rank = if all.is_empty() {
            0
        } else {
            numerical_rank(&ComplexMatrix::from_columns(n, &all), tol)
        };
        return Err(NoCertificateReason::InsufficientWitnesses {
            available: candidates.len(),
            rank,
        });
    }

    // one improvement pass: replace each slot by the unused candidate maximising sigma_min
    let sigma = |idx: &[usize]| {
        let cols: Vec<&[num_complex::Complex64]> = idx.iter().map(|&j| candidates[j].y.as_slice()).collect();
        smallest_singular(&cols, n)
    };
    let mut best = sigma(&chosen);
    for slot in 0..n {
        for cand in 0..candidates.len() {
            if chosen.contains(&cand) {
                continue;
            }
            let mut trial = chosen.clone();
            trial[slot] = cand;
            let s = sigma(&trial);
            if s > best * (1.0 + 1e-12) {
                best = s;
                chosen = trial;
            }
        }
    }

    let pairs: Vec<LambdaPair> = chosen
        .iter()
        .map(|&j| LambdaPair::new(candidates[j].y.clone(), candidates[j].lambda))
        .collect();
    build(&pairs)
        .map(|set| (SelectionRoute::Greedy, set))
        .map_err(NoCertificateReason::Numerical)
}
