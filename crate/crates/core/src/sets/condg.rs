//! Conditional-gradient (Frank-Wolfe) inexact projection.
//!
//! To eps-project x onto C, minimize phi(z) = ||z - x||^2 / 2 over C: at the
//! current iterate z_t take w_t = argmin_{w in C} <z_t - x, w> and stop as
//! soon as gap_t = <x - z_t, w_t - z_t> <= eps, which certifies z_t as an
//! eps-projection. Otherwise step z_{t+1} = (1 - a_t) z_t + a_t w_t with the
//! exact line-search step a_t = clamp(gap_t / ||w_t - z_t||^2, 0, 1).

use crate::linalg::vec;

use super::{EpsProjection, FeasibleSet, SetError};

/// Fixed-tolerance CondG projection. `budget` bounds the number of LMO
/// calls; on exhaustion the best (smallest-gap) iterate is returned with
/// `budget_exhausted` set rather than an error.
pub fn condg_project(
    set: &FeasibleSet,
    x: &[f64],
    eps: f64,
    budget: usize,
) -> Result<EpsProjection, SetError> {
    assert!(eps >= 0.0);
    condg_loop(set, x, budget, |gap, _z| (gap <= eps, eps))
}

/// CondG with the self-referential tolerance of the projected-gradient
/// safeguard: stop once gap_t <= theta^2 ||z_t - anchor||^2, so the output
/// y satisfies <x - y, c - y> <= theta^2 ||y - anchor||^2 for all c in C.
pub fn condg_project_dynamic(
    set: &FeasibleSet,
    x: &[f64],
    anchor: &[f64],
    theta: f64,
    budget: usize,
) -> Result<EpsProjection, SetError> {
    assert!(theta >= 0.0);
    let th2 = theta * theta;
    condg_loop(set, x, budget, |gap, z| {
        let eps_here = th2 * vec::dist(z, anchor).powi(2);
        (gap <= eps_here, eps_here)
    })
}

fn condg_loop(
    set: &FeasibleSet,
    x: &[f64],
    budget: usize,
    stop: impl Fn(f64, &[f64]) -> (bool, f64),
) -> Result<EpsProjection, SetError> {
    if !x.iter().all(|v| v.is_finite()) {
        return Err(SetError::NonFinite);
    }
    let mut z = if set.contains(x, 1e-12) {
        x.to_vec()
    } else {
        set.interior_point()
    };

    let mut best: Option<(f64, f64, Vec<f64>)> = None; // (gap, eps_at_exit, point)
    for t in 0..budget.max(1) {
        let g = vec::sub(&z, x);
        let w = set.linear_minimizer(&g)?;
        let xz = vec::sub(x, &z);
        let wz = vec::sub(&w, &z);
        let gap = vec::dot(&xz, &wz);
        let (done, eps_here) = stop(gap, &z);
        if done {
            return Ok(EpsProjection {
                point: z,
                gap,
                epsilon_used: eps_here,
                inner_iterations: t + 1,
                budget_exhausted: false,
                rank_used: None,
            });
        }
        if best.as_ref().is_none_or(|(bg, _, _)| gap < *bg) {
            best = Some((gap, eps_here, z.clone()));
        }
        let denom = vec::dot(&wz, &wz);
        if denom == 0.0 {
            // w == z with a positive gap cannot happen; bail defensively.
            break;
        }
        let alpha = (gap / denom).clamp(0.0, 1.0);
        for (zi, wi) in z.iter_mut().zip(&wz) {
            *zi += alpha * wi;
        }
    }

    let (gap, eps_here, point) = best.expect("at least one iteration ran");
    Ok(EpsProjection {
        point,
        gap,
        epsilon_used: eps_here,
        inner_iterations: budget,
        budget_exhausted: true,
        rank_used: None,
    })
}
