//! Projection oracle dispatch used by the solvers.
//!
//! The oracle owns the only carried state (the rank-p warm start) and maps
//! an eps-projection request onto the configured backend. Since the exact
//! projection is a valid eps-projection for every eps >= 0, the iterative
//! backends route zero-tolerance requests to the closed form unless
//! `force_iterative` pins them to the iterative path for testing.

use super::{
    condg_project, condg_project_dynamic, fw_rank_p_project, fw_rank_p_project_dynamic,
    EpsProjection, FeasibleSet, RankState, SetError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionMode {
    Exact,
    CondG,
    FwP,
}

impl ProjectionMode {
    /// Reject combinations that cannot work: the rank-p projector needs a
    /// spectrahedron and CondG needs a compact set with an LMO.
    pub fn validate(self, set: &FeasibleSet) -> Result<(), SetError> {
        match self {
            ProjectionMode::Exact => Ok(()),
            ProjectionMode::FwP => match set {
                FeasibleSet::Spectrahedron(_) => Ok(()),
                _ => Err(SetError::RequiresLmo),
            },
            ProjectionMode::CondG => match set {
                FeasibleSet::Box(b) if !b.is_bounded() => Err(SetError::RequiresLmo),
                _ => Ok(()),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProjectionOracle {
    pub mode: ProjectionMode,
    pub condg_budget: usize,
    /// Keep the iterative backend even when eps = 0 and a closed form exists.
    pub force_iterative: bool,
    rank_state: RankState,
}

impl ProjectionOracle {
    pub fn new(mode: ProjectionMode, condg_budget: usize) -> Self {
        Self {
            mode,
            condg_budget,
            force_iterative: false,
            rank_state: RankState::default(),
        }
    }

    pub fn with_initial_rank(mut self, p: usize) -> Self {
        self.rank_state = RankState::new(p);
        self
    }

    pub fn with_force_iterative(mut self, force: bool) -> Self {
        self.force_iterative = force;
        self
    }

    pub fn rank_state(&self) -> RankState {
        self.rank_state
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.mode, ProjectionMode::Exact)
    }

    /// eps-projection of `y` onto `set`.
    pub fn project(
        &mut self,
        set: &FeasibleSet,
        y: &[f64],
        eps: f64,
    ) -> Result<EpsProjection, SetError> {
        match self.mode {
            ProjectionMode::Exact => exact_projection(set, y, eps),
            ProjectionMode::CondG => {
                if eps == 0.0 && !self.force_iterative {
                    exact_projection(set, y, eps)
                } else {
                    condg_project(set, y, eps, self.condg_budget)
                }
            }
            ProjectionMode::FwP => {
                let sp = expect_spectrahedron(set)?;
                if eps == 0.0 && !self.force_iterative {
                    exact_projection(set, y, eps)
                } else {
                    let (proj, rank) = fw_rank_p_project(sp, y, eps, self.rank_state)?;
                    self.rank_state = rank;
                    Ok(proj)
                }
            }
        }
    }

    /// eps-projection with the self-referential tolerance
    /// eps = theta^2 ||y_out - anchor||^2 of the projected-gradient step.
    pub fn project_dynamic(
        &mut self,
        set: &FeasibleSet,
        y: &[f64],
        anchor: &[f64],
        theta: f64,
    ) -> Result<EpsProjection, SetError> {
        match self.mode {
            ProjectionMode::Exact => exact_dynamic(set, y, anchor, theta),
            ProjectionMode::CondG => {
                if theta == 0.0 && !self.force_iterative {
                    exact_dynamic(set, y, anchor, theta)
                } else {
                    condg_project_dynamic(set, y, anchor, theta, self.condg_budget)
                }
            }
            ProjectionMode::FwP => {
                let sp = expect_spectrahedron(set)?;
                if theta == 0.0 && !self.force_iterative {
                    exact_dynamic(set, y, anchor, theta)
                } else {
                    let (proj, rank) =
                        fw_rank_p_project_dynamic(sp, y, anchor, theta, self.rank_state)?;
                    self.rank_state = rank;
                    Ok(proj)
                }
            }
        }
    }
}

fn expect_spectrahedron(set: &FeasibleSet) -> Result<&super::SpectrahedronSet, SetError> {
    match set {
        FeasibleSet::Spectrahedron(s) => Ok(s),
        _ => Err(SetError::RequiresLmo),
    }
}

fn exact_projection(set: &FeasibleSet, y: &[f64], eps: f64) -> Result<EpsProjection, SetError> {
    let point = set.exact_project(y)?;
    Ok(EpsProjection {
        point,
        gap: 0.0,
        epsilon_used: eps,
        inner_iterations: 0,
        budget_exhausted: false,
        rank_used: None,
    })
}

fn exact_dynamic(
    set: &FeasibleSet,
    y: &[f64],
    anchor: &[f64],
    theta: f64,
) -> Result<EpsProjection, SetError> {
    let point = set.exact_project(y)?;
    let eps = theta * theta * crate::linalg::vec::dist(&point, anchor).powi(2);
    Ok(EpsProjection {
        point,
        gap: 0.0,
        epsilon_used: eps,
        inner_iterations: 0,
        budget_exhausted: false,
        rank_used: None,
    })
}
