//! Feasible sets and projection oracles.
//!
//! A feasible set exposes a membership test, an optional closed-form
//! projection, a linear minimization oracle (LMO) over the set, and an
//! interior reference point. An eps-projection of x onto C is any feasible
//! point p with sup_{y in C} <x - p, y - p> <= eps; at eps = 0 this is the
//! orthogonal projection, and the exact projection is a valid eps-projection
//! for every eps >= 0.

mod condg;
mod fwp;
mod oracle;
mod spectra;

pub use condg::{condg_project, condg_project_dynamic};
pub use fwp::{fw_rank_p_project, fw_rank_p_project_dynamic, RankState};
pub use oracle::{ProjectionMode, ProjectionOracle};
pub use spectra::{svec_dim, svec_index, SpectrahedronSet};

use crate::linalg::{project_simplex, vec, LinalgError};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetError {
    #[error("set does not expose a linear minimization oracle")]
    RequiresLmo,
    #[error("non-finite value in input")]
    NonFinite,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Result of a projection oracle call.
///
/// `gap` is the certified value of sup_{y in C} <x - point, y - point>
/// observed at exit (0 for closed-form projections), `epsilon_used` the
/// tolerance the point satisfies, and `inner_iterations` the oracle's
/// inner effort (LMO calls for CondG, rank attempts for the rank-p
/// projector, 0 for closed forms). `budget_exhausted` flags a CondG run
/// that returned its best iterate without meeting the stop rule.
#[derive(Debug, Clone)]
pub struct EpsProjection {
    pub point: Vec<f64>,
    pub gap: f64,
    pub epsilon_used: f64,
    pub inner_iterations: usize,
    pub budget_exhausted: bool,
    pub rank_used: Option<usize>,
}

/// A box { x : l <= x <= u }. Bounds may be infinite; the LMO and the
/// interior reference point require finite bounds.
#[derive(Debug, Clone)]
pub struct BoxSet {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxSet {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(lower.len(), upper.len());
        assert!(
            lower.iter().zip(&upper).all(|(l, u)| l <= u),
            "lower bounds must not exceed upper bounds"
        );
        Self { lower, upper }
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn is_bounded(&self) -> bool {
        self.lower.iter().all(|l| l.is_finite()) && self.upper.iter().all(|u| u.is_finite())
    }

    /// Componentwise clamp min{u, max{x, l}}.
    pub fn clamp(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&xi, (&l, &u))| xi.max(l).min(u))
            .collect()
    }
}

/// The unit simplex { w : w_i >= 0, sum w_i = 1 }.
#[derive(Debug, Clone)]
pub struct SimplexSet {
    dim: usize,
}

impl SimplexSet {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1);
        Self { dim }
    }
}

/// The feasible sets understood by the solvers. Points live in the set's
/// embedding space: plain coordinates for boxes and simplices, the svec
/// embedding of symmetric matrices for the spectrahedron, so solver-level
/// inner products are always Euclidean.
#[derive(Debug, Clone)]
pub enum FeasibleSet {
    Box(BoxSet),
    Simplex(SimplexSet),
    Spectrahedron(SpectrahedronSet),
}

impl FeasibleSet {
    /// Dimension of the embedding space.
    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Box(b) => b.lower.len(),
            FeasibleSet::Simplex(s) => s.dim,
            FeasibleSet::Spectrahedron(s) => s.embed_dim(),
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        match self {
            FeasibleSet::Box(b) => x
                .iter()
                .zip(b.lower.iter().zip(&b.upper))
                .all(|(&xi, (&l, &u))| xi >= l - tol && xi <= u + tol),
            FeasibleSet::Simplex(_) => {
                let sum: f64 = x.iter().sum();
                (sum - 1.0).abs() <= tol && x.iter().all(|&xi| xi >= -tol)
            }
            FeasibleSet::Spectrahedron(s) => s.contains(x, tol),
        }
    }

    /// Distance-like measure of infeasibility; 0 for members.
    pub fn violation(&self, x: &[f64]) -> f64 {
        match self {
            FeasibleSet::Box(b) => vec::dist(x, &b.clamp(x)),
            FeasibleSet::Simplex(_) => match project_simplex(x) {
                Ok(p) => vec::dist(x, &p),
                Err(_) => f64::INFINITY,
            },
            FeasibleSet::Spectrahedron(s) => s.violation(x),
        }
    }

    /// Closed-form orthogonal projection, if the set has one. All three
    /// sets here do; boxes with infinite bounds still clamp.
    pub fn exact_project(&self, x: &[f64]) -> Result<Vec<f64>, SetError> {
        if !x.iter().all(|v| v.is_finite()) {
            return Err(SetError::NonFinite);
        }
        match self {
            FeasibleSet::Box(b) => Ok(b.clamp(x)),
            FeasibleSet::Simplex(_) => Ok(project_simplex(x)?),
            FeasibleSet::Spectrahedron(s) => s.exact_project(x),
        }
    }

    /// argmin_{z in C} <g, z>. Requires a compact set.
    pub fn linear_minimizer(&self, g: &[f64]) -> Result<Vec<f64>, SetError> {
        if !g.iter().all(|v| v.is_finite()) {
            return Err(SetError::NonFinite);
        }
        match self {
            FeasibleSet::Box(b) => {
                if !b.is_bounded() {
                    return Err(SetError::RequiresLmo);
                }
                Ok(g.iter()
                    .zip(b.lower.iter().zip(&b.upper))
                    .map(|(&gi, (&l, &u))| if gi <= 0.0 { u } else { l })
                    .collect())
            }
            FeasibleSet::Simplex(s) => {
                let mut imin = 0;
                for (i, gi) in g.iter().enumerate() {
                    if *gi < g[imin] {
                        imin = i;
                    }
                }
                let mut w = vec![0.0; s.dim];
                w[imin] = 1.0;
                Ok(w)
            }
            FeasibleSet::Spectrahedron(s) => s.linear_minimizer(g),
        }
    }

    /// Interior reference point used to initialize CondG: box midpoint,
    /// simplex/spectrahedron barycenter.
    pub fn interior_point(&self) -> Vec<f64> {
        match self {
            FeasibleSet::Box(b) => b
                .lower
                .iter()
                .zip(&b.upper)
                .map(|(&l, &u)| {
                    if l.is_finite() && u.is_finite() {
                        0.5 * (l + u)
                    } else {
                        0.0f64.max(l).min(u)
                    }
                })
                .collect(),
            FeasibleSet::Simplex(s) => vec![1.0 / s.dim as f64; s.dim],
            FeasibleSet::Spectrahedron(s) => s.barycenter(),
        }
    }
}

/// Certificate value sup_{y in C} <x - p, y - p>, computed with one LMO
/// call; p must lie in C. Exact for polytopes; for the spectrahedron the
/// maximizer is the leading eigenvector vertex.
pub fn certify_eps_projection(set: &FeasibleSet, x: &[f64], p: &[f64]) -> Result<f64, SetError> {
    let d = vec::sub(p, x);
    let w = set.linear_minimizer(&d)?;
    let xp = vec::sub(x, p);
    let wp = vec::sub(&w, p);
    Ok(vec::dot(&xp, &wp))
}
