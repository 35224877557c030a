//! Local projected Levenberg-Marquardt iteration.
//!
//! Each step solves the regularized system (J^T J + mu I) d = -J^T F with
//! mu = ||F||^2, then replaces the trial point x + d by an eps-projection
//! onto the feasible set with the coupled tolerance eps = theta_k^2 ||d||^2.
//! Larger theta admits sloppier projections; theta = 0 demands the exact
//! projection and preserves the fast local rate.

use std::time::Instant;

use crate::linalg::{check_finite, vec};
use crate::sets::ProjectionOracle;
use crate::trace::{StepKind, TraceRecord};

use super::{
    Jacobian, NlsProblem, ProjectionConfig, SolveResult, SolveStatus, SolverError, ThetaSchedule,
};

#[derive(Debug, Clone)]
pub struct LocalConfig {
    pub theta: ThetaSchedule,
    pub tol_f: f64,
    pub max_iters: usize,
    pub projection: ProjectionConfig,
}

impl Default for LocalConfig {
    fn default() -> Self {
        Self {
            theta: ThetaSchedule::Zero,
            tol_f: 1e-6,
            max_iters: 200,
            projection: ProjectionConfig::default(),
        }
    }
}

/// State of one iterate: the point, its residual and Jacobian, the
/// regularization mu = ||F||^2, merit value, gradient, and the last
/// unconstrained direction with its projection tolerance.
#[derive(Debug)]
pub struct IterateState {
    pub k: usize,
    pub x: Vec<f64>,
    pub f_val: Vec<f64>,
    pub j_val: Jacobian,
    pub norm_f: f64,
    pub mu: f64,
    pub f: f64,
    pub grad: Vec<f64>,
    pub d_u: Option<Vec<f64>>,
    pub eps_k: f64,
}

impl IterateState {
    pub fn evaluate(problem: &dyn NlsProblem, x: Vec<f64>, k: usize) -> Result<Self, SolverError> {
        check_finite(&x).map_err(|_| SolverError::NonFinite)?;
        let f_val = problem.residual(&x);
        check_finite(&f_val).map_err(|_| SolverError::NonFinite)?;
        let j_val = problem.jacobian(&x);
        let norm_f = vec::norm2(&f_val);
        let grad = j_val.t_matvec(&f_val);
        check_finite(&grad).map_err(|_| SolverError::NonFinite)?;
        Ok(Self {
            k,
            x,
            f_val,
            j_val,
            norm_f,
            mu: norm_f * norm_f,
            f: 0.5 * norm_f * norm_f,
            grad,
            d_u: None,
            eps_k: 0.0,
        })
    }
}

/// Unconstrained regularized direction d solving
/// (J^T J + mu I) d = -J^T F with mu = ||F||^2 > 0. Stored in the state.
pub fn lm_direction(state: &mut IterateState) -> Result<&[f64], SolverError> {
    if state.norm_f == 0.0 {
        return Err(SolverError::ZeroResidual);
    }
    let d = state.j_val.lm_solve(&state.f_val, state.mu)?;
    state.d_u = Some(d);
    Ok(state.d_u.as_deref().expect("just stored"))
}

/// One step: eps-project x + d with eps = theta_k^2 ||d||^2, returning the
/// next feasible point together with the projection diagnostics.
pub fn lmm_step(
    problem: &dyn NlsProblem,
    state: &mut IterateState,
    theta_k: f64,
    oracle: &mut ProjectionOracle,
) -> Result<crate::sets::EpsProjection, SolverError> {
    if state.d_u.is_none() {
        lm_direction(state)?;
    }
    let d = state.d_u.as_ref().expect("direction computed");
    let nd = vec::norm2(d);
    state.eps_k = theta_k * theta_k * nd * nd;
    let trial = vec::add(&state.x, d);
    let proj = oracle.project(problem.feasible_set(), &trial, state.eps_k)?;
    if proj.budget_exhausted {
        return Err(SolverError::ProjectionBudget);
    }
    Ok(proj)
}

/// Run the local method from `x0` until ||F|| <= tol_f or the iteration
/// limit. An infeasible start is projected once and flagged.
pub fn solve(
    problem: &dyn NlsProblem,
    x0: &[f64],
    config: &LocalConfig,
) -> Result<SolveResult, SolverError> {
    assert_eq!(x0.len(), problem.var_dim());
    let set = problem.feasible_set();
    let mut oracle = config.projection.build_oracle();

    let run_start = Instant::now();
    let mut start_projected = false;
    let mut x = x0.to_vec();
    if !set.contains(&x, 1e-10) {
        x = oracle.project(set, &x, 0.0)?.point;
        start_projected = true;
    }

    let mut state = IterateState::evaluate(problem, x, 0)?;
    let mut f_evals = 1usize;
    let mut trace = vec![TraceRecord {
        k: 0,
        norm_f: state.norm_f,
        f: state.f,
        kind: StepKind::Init,
        alpha: 0.0,
        backtracks: 0,
        proj_iters: 0,
        rank_p: 0,
        infeas: set.violation(&state.x),
        ms: run_start.elapsed().as_secs_f64() * 1000.0,
    }];

    let mut status = SolveStatus::MaxIters;
    let mut iterations = 0usize;
    for k in 0..config.max_iters {
        if state.norm_f <= config.tol_f {
            status = SolveStatus::Converged;
            break;
        }
        let iter_start = Instant::now();
        lm_direction(&mut state)?;
        let theta_k = config.theta.at(k);
        let proj = lmm_step(problem, &mut state, theta_k, &mut oracle)?;
        let proj_iters = proj.inner_iterations;
        let rank_p = proj.rank_used.unwrap_or(0);
        state = IterateState::evaluate(problem, proj.point, k + 1)?;
        f_evals += 1;
        iterations += 1;
        trace.push(TraceRecord {
            k: k + 1,
            norm_f: state.norm_f,
            f: state.f,
            kind: StepKind::Lm,
            alpha: 1.0,
            backtracks: 0,
            proj_iters,
            rank_p,
            infeas: set.violation(&state.x),
            ms: iter_start.elapsed().as_secs_f64() * 1000.0,
        });
    }
    if status == SolveStatus::MaxIters && state.norm_f <= config.tol_f {
        status = SolveStatus::Converged;
    }

    Ok(SolveResult {
        x: state.x,
        status,
        iterations,
        f_evals,
        start_projected,
        trace,
    })
}
