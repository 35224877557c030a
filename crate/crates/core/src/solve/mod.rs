//! The solvers: a local projected Levenberg-Marquardt iteration and its
//! globalized variant with a nonmonotone line search and projected-gradient
//! safeguard.

pub mod global;
pub mod local;
pub mod problem;

pub use global::{
    lm_direction_filter, nonmonotone_search, projected_gradient_direction, FilterOutcome,
    GlobalConfig, HistoryWindow, SearchOutcome, SearchResult,
};
pub use local::{lm_direction, lmm_step, IterateState, LocalConfig};
pub use problem::{check_jacobian_fd, merit_and_gradient, Jacobian, NlsProblem};

use crate::linalg::LinalgError;
use crate::sets::{ProjectionMode, ProjectionOracle, SetError};
use crate::trace::TraceRecord;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("non-finite value encountered during evaluation")]
    NonFinite,
    #[error("residual is zero; the point already solves the system")]
    ZeroResidual,
    #[error("projection oracle exhausted its iteration budget")]
    ProjectionBudget,
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Terminal state of a solver run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SolveStatus {
    /// ||F|| reached the residual tolerance.
    Converged,
    /// Iteration limit reached.
    MaxIters,
    /// The backtracking line search ran out of trials.
    LineSearchFail,
    /// Stationary point of the merit function that does not solve F = 0.
    Stationary,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolveStatus::Converged => "Converged",
            SolveStatus::MaxIters => "MaxIters",
            SolveStatus::LineSearchFail => "LineSearchFail",
            SolveStatus::Stationary => "Stationary",
        };
        f.write_str(s)
    }
}

/// Per-iteration tolerance schedule theta_k for the inexact projections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaSchedule {
    Zero,
    Constant(f64),
    /// theta_k = theta0 * rho^k.
    Geometric { theta0: f64, rho: f64 },
}

impl ThetaSchedule {
    pub fn at(&self, k: usize) -> f64 {
        match *self {
            ThetaSchedule::Zero => 0.0,
            ThetaSchedule::Constant(t) => t,
            ThetaSchedule::Geometric { theta0, rho } => theta0 * rho.powi(k as i32),
        }
    }
}

/// How trial points are projected back onto the feasible set.
#[derive(Debug, Clone, Copy)]
pub struct ProjectionConfig {
    pub mode: ProjectionMode,
    pub condg_budget: usize,
    /// Use the iterative oracle even when theta_k = 0 (testing switch).
    pub force_iterative: bool,
    /// Warm-start rank for the rank-p spectrahedron projector.
    pub initial_rank: usize,
}

impl Default for ProjectionConfig {
    fn default() -> Self {
        Self {
            mode: ProjectionMode::Exact,
            condg_budget: 10_000,
            force_iterative: false,
            initial_rank: 1,
        }
    }
}

impl ProjectionConfig {
    pub fn build_oracle(&self) -> ProjectionOracle {
        ProjectionOracle::new(self.mode, self.condg_budget)
            .with_initial_rank(self.initial_rank)
            .with_force_iterative(self.force_iterative)
    }
}

/// Output of a solver run.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub x: Vec<f64>,
    pub status: SolveStatus,
    /// Number of accepted steps (trace has `iterations + 1` rows).
    pub iterations: usize,
    /// Residual evaluations: 1 initial plus one per line-search trial.
    pub f_evals: usize,
    /// True when the supplied start was infeasible and projected once.
    pub start_projected: bool,
    pub trace: Vec<TraceRecord>,
}

impl SolveResult {
    pub fn final_norm_f(&self) -> f64 {
        self.trace.last().map(|r| r.norm_f).unwrap_or(f64::NAN)
    }
}
