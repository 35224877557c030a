//! Rank-p Frank-Wolfe projection onto the spectrahedron with rank doubling.
//!
//! A rank-p candidate is the best unit-trace PSD approximation of the
//! embedded matrix Y built from its top-p eigenpairs: Z = V diag(w) V^T
//! with w the simplex projection of the p largest eigenvalues. The
//! candidate is certified by solving the linear subproblem
//! max_{W in S} <Y - Z, W - Z> exactly: the maximizer is the vertex v v^T
//! for the leading eigenpair of A = Y - Z, so the gap is
//! lambda_max(A) - <A, Z>. If the gap exceeds the tolerance, p doubles
//! (capped at n, where the candidate is the exact projection by
//! construction). The accepted rank is returned as the warm start for the
//! next outer iteration.

use crate::linalg::{project_simplex, sym_eig_full, sym_eig_topk, vec, SymMatrix};

use super::{EpsProjection, SetError, SpectrahedronSet};

/// Rank guess carried across projections of successive outer iterates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankState {
    pub p: usize,
}

impl RankState {
    pub fn new(p: usize) -> Self {
        assert!(p >= 1);
        Self { p }
    }
}

impl Default for RankState {
    fn default() -> Self {
        Self { p: 1 }
    }
}

/// Fixed-tolerance rank-p projection of the embedded point `y`.
pub fn fw_rank_p_project(
    set: &SpectrahedronSet,
    y: &[f64],
    eps: f64,
    state: RankState,
) -> Result<(EpsProjection, RankState), SetError> {
    assert!(eps >= 0.0);
    fwp_loop(set, y, state, |gap, _z| (gap <= eps, eps))
}

/// Rank-p projection with the self-referential tolerance
/// gap <= theta^2 ||Z - anchor||^2 used by projected-gradient safeguards.
pub fn fw_rank_p_project_dynamic(
    set: &SpectrahedronSet,
    y: &[f64],
    anchor: &[f64],
    theta: f64,
    state: RankState,
) -> Result<(EpsProjection, RankState), SetError> {
    assert!(theta >= 0.0);
    let th2 = theta * theta;
    fwp_loop(set, y, state, |gap, z| {
        let eps_here = th2 * vec::dist(z, anchor).powi(2);
        (gap <= eps_here, eps_here)
    })
}

fn fwp_loop(
    set: &SpectrahedronSet,
    y: &[f64],
    state: RankState,
    accept: impl Fn(f64, &[f64]) -> (bool, f64),
) -> Result<(EpsProjection, RankState), SetError> {
    if !y.iter().all(|v| v.is_finite()) {
        return Err(SetError::NonFinite);
    }
    let n = set.matrix_dim();
    let ymat = set.unsvec(y);
    let mut p = state.p.clamp(1, n);
    let mut attempts = 0usize;

    loop {
        attempts += 1;
        let zmat = rank_p_candidate(&ymat, p, n)?;
        let a = ymat.sub(&zmat);
        // Dual of the linear subproblem: the optimum is the largest
        // eigenvalue of A, attained at the vertex v v^T.
        let lead = sym_eig_topk(&a, 1)?;
        let gap = lead[0].value - a.frobenius_dot(&zmat);
        let z = set.svec(&zmat);
        let (ok, eps_here) = accept(gap, &z);
        if ok || p >= n {
            // p = n reproduces the exact projection, so the certificate
            // holds there up to eigensolver rounding.
            let proj = EpsProjection {
                point: z,
                gap,
                epsilon_used: eps_here,
                inner_iterations: attempts,
                budget_exhausted: false,
                rank_used: Some(p),
            };
            return Ok((proj, RankState { p }));
        }
        p = (2 * p).min(n);
    }
}

/// Closest unit-trace PSD matrix of rank at most p: eigenvalue simplex
/// projection restricted to the top-p eigenspace. At p = n this is the
/// exact projection.
fn rank_p_candidate(ymat: &SymMatrix, p: usize, n: usize) -> Result<SymMatrix, SetError> {
    let pairs = if p >= n {
        sym_eig_full(ymat)?
    } else {
        sym_eig_topk(ymat, p)?
    };
    let vals: Vec<f64> = pairs.iter().map(|e| e.value).collect();
    let w = project_simplex(&vals)?;
    let vecs: Vec<Vec<f64>> = pairs.into_iter().map(|e| e.vector).collect();
    Ok(SymMatrix::from_weighted_outer(n, &w, &vecs))
}
