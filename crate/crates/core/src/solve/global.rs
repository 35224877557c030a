//! Globalized projected Levenberg-Marquardt method.
//!
//! Each iteration first tries the projected LM direction
//! dbar = P_C(x + d_u, eps_k) - x, accepted only if it is a usable descent
//! candidate: |<grad f, dbar>| > eta1 ||dbar||^2 and
//! eta2 ||grad f|| <= ||dbar|| <= eta3 ||grad f||, taking
//! d = -sgn(<grad f, dbar>) dbar. Otherwise an inexact projected-gradient
//! direction d = y - x is used, where y eps-projects x - grad f with the
//! self-referential tolerance eps = theta_k^2 ||y - x||^2; d = 0 there
//! certifies stationarity. The step length comes from a nonmonotone
//! backtracking search against the watermark max of the last m_k + 1 merit
//! values, with m_k = min(m_{k-1} + 1, M).

use std::collections::VecDeque;
use std::time::Instant;

use crate::linalg::{check_finite, vec};
use crate::trace::{StepKind, TraceRecord};

use super::{
    NlsProblem, ProjectionConfig, SolveResult, SolveStatus, SolverError, ThetaSchedule,
};

#[derive(Debug, Clone)]
pub struct GlobalConfig {
    /// Nonmonotone memory M >= 0; M = 0 is the classical Armijo rule.
    pub memory: usize,
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
    pub gamma: f64,
    pub beta: f64,
    pub theta: ThetaSchedule,
    pub tol_f: f64,
    /// Declare stationarity when the exact projected-gradient step is
    /// shorter than this.
    pub tol_stationarity: f64,
    pub max_iters: usize,
    pub max_backtracks: usize,
    pub projection: ProjectionConfig,
}

impl GlobalConfig {
    /// Parameter block used for the box-constrained experiments:
    /// M = 1, eta1 = 1e-4, eta2 = 1e-2, eta3 = 1e10, gamma = 1e-3,
    /// beta = 1/2, theta = 0, ||F|| tolerance 1e-6.
    pub fn preset_box() -> Self {
        Self {
            memory: 1,
            eta1: 1e-4,
            eta2: 1e-2,
            eta3: 1e10,
            gamma: 1e-3,
            beta: 0.5,
            theta: ThetaSchedule::Zero,
            tol_f: 1e-6,
            tol_stationarity: 1e-12,
            max_iters: 500,
            max_backtracks: 60,
            projection: ProjectionConfig::default(),
        }
    }

    /// Parameter block used for the spectrahedron experiments:
    /// M = 1, eta1 = 1e-2, eta2 = 1e-3, eta3 = 1e6, gamma = 1e-3,
    /// beta = 1/2, theta = 0.9, ||F|| tolerance 1e-2.
    pub fn preset_spectrahedron() -> Self {
        Self {
            memory: 1,
            eta1: 1e-2,
            eta2: 1e-3,
            eta3: 1e6,
            gamma: 1e-3,
            beta: 0.5,
            theta: ThetaSchedule::Constant(0.9),
            tol_f: 1e-2,
            tol_stationarity: 1e-12,
            max_iters: 500,
            max_backtracks: 60,
            projection: ProjectionConfig::default(),
        }
    }
}

impl Default for GlobalConfig {
    fn default() -> Self {
        Self::preset_box()
    }
}

/// Ring buffer of the last M + 1 merit values. The window length follows
/// m_k = min(m_{k-1} + 1, M), so the watermark sequence of maxima is
/// non-increasing along accepted iterations.
#[derive(Debug, Clone)]
pub struct HistoryWindow {
    buf: VecDeque<f64>,
    cap: usize,
}

impl HistoryWindow {
    pub fn new(memory: usize) -> Self {
        Self {
            buf: VecDeque::with_capacity(memory + 1),
            cap: memory + 1,
        }
    }

    pub fn push(&mut self, f: f64) {
        if self.buf.len() == self.cap {
            self.buf.pop_front();
        }
        self.buf.push_back(f);
    }

    /// Current window length m_k + 1.
    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    /// max of the stored merit values.
    pub fn watermark(&self) -> f64 {
        self.buf.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone)]
pub enum FilterOutcome {
    /// Direction accepted, reoriented to descend: d with <grad, d> = -|<grad, dbar>|.
    Accepted { d: Vec<f64>, dd: f64 },
    Rejected,
}

/// Projected-LM direction filter. `dbar` is the projected step
/// P_C(x + d_u, eps) - x.
pub fn lm_direction_filter(grad: &[f64], dbar: &[f64], eta1: f64, eta2: f64, eta3: f64) -> FilterOutcome {
    let ip = vec::dot(grad, dbar);
    let nd = vec::norm2(dbar);
    let ng = vec::norm2(grad);
    if ip.abs() > eta1 * nd * nd && eta2 * ng <= nd && nd <= eta3 * ng {
        let flip = if ip > 0.0 { -1.0 } else { 1.0 };
        let d: Vec<f64> = dbar.iter().map(|v| flip * v).collect();
        FilterOutcome::Accepted { d, dd: -ip.abs() }
    } else {
        FilterOutcome::Rejected
    }
}

/// Inexact projected-gradient safeguard direction: d = y - x where y
/// eps-projects x - grad f onto the set under the self-referential
/// tolerance eps = theta^2 ||y - x||^2. A zero direction certifies
/// stationarity of the merit function over the set.
pub fn projected_gradient_direction(
    set: &crate::sets::FeasibleSet,
    x: &[f64],
    grad: &[f64],
    theta: f64,
    oracle: &mut crate::sets::ProjectionOracle,
) -> Result<(Vec<f64>, crate::sets::EpsProjection), SolverError> {
    let target = vec::sub(x, grad);
    let pg = oracle.project_dynamic(set, &target, x, theta)?;
    if pg.budget_exhausted {
        return Err(SolverError::ProjectionBudget);
    }
    let d = vec::sub(&pg.point, x);
    Ok((d, pg))
}

#[derive(Debug, Clone)]
pub struct SearchOutcome<T> {
    pub alpha: f64,
    /// Merit evaluations performed, i.e. backtracks + 1.
    pub trials: usize,
    pub x_new: Vec<f64>,
    pub f_new: f64,
    pub payload: T,
}

#[derive(Debug, Clone)]
pub enum SearchResult<T> {
    Accepted(SearchOutcome<T>),
    /// No step length in {1, beta, beta^2, ...} passed within the trial cap.
    Exhausted,
}

/// Nonmonotone backtracking: the largest alpha in {1, beta, beta^2, ...}
/// with f(x + alpha d) <= watermark + gamma alpha dd, where dd = <grad f, d>
/// is supplied by the caller and must be negative. `merit` returns the
/// merit value plus a payload reused by the caller (one residual
/// evaluation per trial).
pub fn nonmonotone_search<T>(
    mut merit: impl FnMut(&[f64]) -> Result<(f64, T), SolverError>,
    x: &[f64],
    d: &[f64],
    dd: f64,
    watermark: f64,
    gamma: f64,
    beta: f64,
    max_backtracks: usize,
) -> Result<SearchResult<T>, SolverError> {
    debug_assert!(dd < 0.0, "search direction must be a descent direction");
    debug_assert!(beta > 0.0 && beta < 1.0);
    let mut alpha = 1.0;
    for trial in 0..=max_backtracks {
        let x_new = vec::add_scaled(x, alpha, d);
        let (f_new, payload) = merit(&x_new)?;
        if f_new <= watermark + gamma * alpha * dd {
            return Ok(SearchResult::Accepted(SearchOutcome {
                alpha,
                trials: trial + 1,
                x_new,
                f_new,
                payload,
            }));
        }
        alpha *= beta;
    }
    Ok(SearchResult::Exhausted)
}

/// Run the globalized method from `x0`.
pub fn solve(
    problem: &dyn NlsProblem,
    x0: &[f64],
    config: &GlobalConfig,
) -> Result<SolveResult, SolverError> {
    assert_eq!(x0.len(), problem.var_dim());
    assert!(config.eta1 > 0.0 && config.eta2 > 0.0 && config.eta3 > config.eta2);
    assert!(config.gamma > 0.0 && config.gamma < 1.0);
    assert!(config.beta > 0.0 && config.beta < 1.0);
    let set = problem.feasible_set();
    let mut oracle = config.projection.build_oracle();

    let run_start = Instant::now();
    let mut start_projected = false;
    let mut x = x0.to_vec();
    if !set.contains(&x, 1e-10) {
        x = oracle.project(set, &x, 0.0)?.point;
        start_projected = true;
    }

    let mut f_evals = 1usize;
    let mut residual = problem.residual(&x);
    check_finite(&residual).map_err(|_| SolverError::NonFinite)?;
    let mut norm_f = vec::norm2(&residual);
    let mut merit_val = 0.5 * norm_f * norm_f;

    let mut window = HistoryWindow::new(config.memory);
    window.push(merit_val);

    let mut trace = vec![TraceRecord {
        k: 0,
        norm_f,
        f: merit_val,
        kind: StepKind::Init,
        alpha: 0.0,
        backtracks: 0,
        proj_iters: 0,
        rank_p: 0,
        infeas: set.violation(&x),
        ms: run_start.elapsed().as_secs_f64() * 1000.0,
    }];

    let mut status = SolveStatus::MaxIters;
    let mut iterations = 0usize;
    for k in 0..config.max_iters {
        if norm_f <= config.tol_f {
            status = SolveStatus::Converged;
            break;
        }
        let iter_start = Instant::now();
        let theta_k = config.theta.at(k);

        let jac = problem.jacobian(&x);
        let grad = jac.t_matvec(&residual);
        check_finite(&grad).map_err(|_| SolverError::NonFinite)?;
        let mu = norm_f * norm_f;
        let d_u = jac.lm_solve(&residual, mu)?;
        let nd_u = vec::norm2(&d_u);
        let eps_k = theta_k * theta_k * nd_u * nd_u;
        let proj = oracle.project(set, &vec::add(&x, &d_u), eps_k)?;
        if proj.budget_exhausted {
            return Err(SolverError::ProjectionBudget);
        }
        let dbar = vec::sub(&proj.point, &x);

        let (d, dd, kind, proj_iters, rank_p) =
            match lm_direction_filter(&grad, &dbar, config.eta1, config.eta2, config.eta3) {
                FilterOutcome::Accepted { d, dd } => (
                    d,
                    dd,
                    StepKind::Lm,
                    proj.inner_iterations,
                    proj.rank_used.unwrap_or(0),
                ),
                FilterOutcome::Rejected => {
                    let (d, pg) =
                        projected_gradient_direction(set, &x, &grad, theta_k, &mut oracle)?;
                    let nd = vec::norm2(&d);
                    if nd <= 1e-12 * (1.0 + vec::norm2(&x)) {
                        status = SolveStatus::Stationary;
                        break;
                    }
                    // With the exact projector this is the stationarity
                    // measure ||P_C(x - grad f) - x|| itself.
                    if oracle.is_exact() && nd <= config.tol_stationarity {
                        status = SolveStatus::Stationary;
                        break;
                    }
                    let dd = vec::dot(&grad, &d);
                    (
                        d,
                        dd,
                        StepKind::Pg,
                        pg.inner_iterations,
                        pg.rank_used.unwrap_or(0),
                    )
                }
            };
        debug_assert!(dd < 0.0);

        let watermark = window.watermark();
        let outcome = {
            let evals = &mut f_evals;
            nonmonotone_search(
                |xt| {
                    let ft = problem.residual(xt);
                    check_finite(&ft).map_err(|_| SolverError::NonFinite)?;
                    *evals += 1;
                    let nf = vec::norm2(&ft);
                    Ok((0.5 * nf * nf, (ft, nf)))
                },
                &x,
                &d,
                dd,
                watermark,
                config.gamma,
                config.beta,
                config.max_backtracks,
            )?
        };
        match outcome {
            SearchResult::Exhausted => {
                status = SolveStatus::LineSearchFail;
                break;
            }
            SearchResult::Accepted(out) => {
                x = out.x_new;
                merit_val = out.f_new;
                let (ft, nf) = out.payload;
                residual = ft;
                norm_f = nf;
                window.push(merit_val);
                iterations += 1;
                trace.push(TraceRecord {
                    k: k + 1,
                    norm_f,
                    f: merit_val,
                    kind,
                    alpha: out.alpha,
                    backtracks: out.trials - 1,
                    proj_iters,
                    rank_p,
                    infeas: set.violation(&x),
                    ms: iter_start.elapsed().as_secs_f64() * 1000.0,
                });
            }
        }
    }
    if status == SolveStatus::MaxIters && norm_f <= config.tol_f {
        status = SolveStatus::Converged;
    }

    Ok(SolveResult {
        x,
        status,
        iterations,
        f_evals,
        start_projected,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;
    use crate::sets::{BoxSet, FeasibleSet};
    use crate::solve::Jacobian;

    #[test]
    fn window_watermark_and_length() {
        let mut w = HistoryWindow::new(2);
        w.push(5.0);
        assert_eq!(w.watermark(), 5.0);
        w.push(3.0);
        w.push(4.0);
        // Window {5,3,4}: reference value is the max regardless of order.
        assert_eq!(w.watermark(), 5.0);
        assert_eq!(w.len(), 3);
        w.push(1.0);
        // 5.0 evicted.
        assert_eq!(w.watermark(), 4.0);
    }

    #[test]
    fn memory_zero_is_monotone() {
        let mut w = HistoryWindow::new(0);
        w.push(5.0);
        w.push(3.0);
        assert_eq!(w.len(), 1);
        assert_eq!(w.watermark(), 3.0);
    }

    #[test]
    fn filter_examples() {
        // Pass: g=(1,0), dbar=(-1,0) with generous box.
        match lm_direction_filter(&[1.0, 0.0], &[-1.0, 0.0], 1e-4, 1e-2, 1e10) {
            FilterOutcome::Accepted { d, dd } => {
                assert_eq!(d, vec![-1.0, 0.0]);
                assert_eq!(dd, -1.0);
            }
            FilterOutcome::Rejected => panic!("should pass"),
        }
        // dbar = 0 is rejected (0 > 0 fails).
        assert!(matches!(
            lm_direction_filter(&[1.0, 0.0], &[0.0, 0.0], 1e-4, 1e-2, 1e10),
            FilterOutcome::Rejected
        ));
        // Orthogonal direction: <g, dbar> = 0 fails the angle test.
        assert!(matches!(
            lm_direction_filter(&[1.0, 0.0], &[0.0, 1.0], 1e-4, 1e-2, 1e10),
            FilterOutcome::Rejected
        ));
    }

    #[test]
    fn filter_flips_ascent_directions() {
        match lm_direction_filter(&[1.0, 0.0], &[0.5, 0.0], 1e-4, 1e-2, 1e10) {
            FilterOutcome::Accepted { d, dd } => {
                assert_eq!(d, vec![-0.5, 0.0]);
                assert!((dd + 0.5).abs() < 1e-15);
            }
            FilterOutcome::Rejected => panic!("should pass with flipped sign"),
        }
    }

    #[test]
    fn projected_gradient_examples() {
        let b = FeasibleSet::Box(BoxSet::new(vec![0.0, 0.0], vec![1.0, 1.0]));
        let mut oracle = ProjectionConfig::default().build_oracle();
        // Interior point, small gradient, theta = 0: the projection is the
        // identity, so d = -grad.
        let (d, _) =
            projected_gradient_direction(&b, &[0.5, 0.5], &[0.1, 0.05], 0.0, &mut oracle).unwrap();
        assert!((d[0] + 0.1).abs() < 1e-15 && (d[1] + 0.05).abs() < 1e-15);
        // Vertex with the negative gradient pointing outward: d = 0.
        let (d, _) = projected_gradient_direction(&b, &[1.0, 1.0], &[-1.0, -1.0], 0.0, &mut oracle)
            .unwrap();
        assert_eq!(d, vec![0.0, 0.0]);
        // Face case: x = (1, 0.5), g = (-1, 0): clamp((2, 0.5)) = x.
        let (d, pg) =
            projected_gradient_direction(&b, &[1.0, 0.5], &[-1.0, 0.0], 0.0, &mut oracle).unwrap();
        assert_eq!(d, vec![0.0, 0.0]);
        assert!(pg.gap <= 1e-15);
    }

    #[test]
    fn search_accepts_full_step_on_quadratic() {
        // f = x^2/2 at x=1, d=-1, window watermark 0.5, gamma=1e-3:
        // f(0) = 0 <= 0.5 - 0.001.
        let merit = |x: &[f64]| Ok((0.5 * x[0] * x[0], ()));
        match nonmonotone_search(merit, &[1.0], &[-1.0], -1.0, 0.5, 1e-3, 0.5, 30).unwrap() {
            SearchResult::Accepted(out) => {
                assert_eq!(out.alpha, 1.0);
                assert_eq!(out.trials, 1);
            }
            SearchResult::Exhausted => panic!("full step passes"),
        }
    }

    #[test]
    fn search_backtracks_once_on_quartic() {
        // f(x) = x^4 at x = 1, d = -3 with dd = -3 supplied, gamma = 0.5,
        // beta = 1/2, watermark 1: alpha=1 gives f(-2)=16 > 1 - 1.5;
        // alpha=1/2 gives f(-0.5)=0.0625 <= 1 - 0.75.
        let merit = |x: &[f64]| Ok((x[0].powi(4), ()));
        match nonmonotone_search(merit, &[1.0], &[-3.0], -3.0, 1.0, 0.5, 0.5, 30).unwrap() {
            SearchResult::Accepted(out) => {
                assert_eq!(out.alpha, 0.5);
                assert_eq!(out.trials, 2);
            }
            SearchResult::Exhausted => panic!("second trial passes"),
        }
    }

    #[test]
    fn search_exhaustion() {
        // Constant merit above the watermark can never satisfy the test.
        let merit = |_: &[f64]| Ok((10.0, ()));
        match nonmonotone_search(merit, &[0.0], &[-1.0], -1.0, 1.0, 0.5, 0.5, 5).unwrap() {
            SearchResult::Exhausted => {}
            SearchResult::Accepted(_) => panic!("cannot accept"),
        }
    }

    /// F(x) = (x1^2 + x2^2 - 1, x1 - x2) on the box [0,1]^2.
    struct Circle {
        set: FeasibleSet,
    }

    impl Circle {
        fn new() -> Self {
            Self {
                set: FeasibleSet::Box(BoxSet::new(vec![0.0, 0.0], vec![1.0, 1.0])),
            }
        }
    }

    impl NlsProblem for Circle {
        fn name(&self) -> &str {
            "circle"
        }
        fn residual_dim(&self) -> usize {
            2
        }
        fn var_dim(&self) -> usize {
            2
        }
        fn residual(&self, x: &[f64]) -> Vec<f64> {
            vec![x[0] * x[0] + x[1] * x[1] - 1.0, x[0] - x[1]]
        }
        fn jacobian(&self, x: &[f64]) -> Jacobian {
            Jacobian::Dense(DenseMatrix::from_rows(
                2,
                2,
                vec![2.0 * x[0], 2.0 * x[1], 1.0, -1.0],
            ))
        }
        fn feasible_set(&self) -> &FeasibleSet {
            &self.set
        }
    }

    #[test]
    fn solves_coupled_system() {
        let p = Circle::new();
        let result = solve(&p, &[1.0, 0.0], &GlobalConfig::preset_box()).unwrap();
        assert_eq!(result.status, SolveStatus::Converged);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((result.x[0] - r).abs() < 1e-5);
        assert!((result.x[1] - r).abs() < 1e-5);
        // Fe accounting: 1 + sum of (backtracks + 1) over iterations.
        let expected: usize = 1 + result
            .trace
            .iter()
            .skip(1)
            .map(|r| r.backtracks + 1)
            .sum::<usize>();
        assert_eq!(result.f_evals, expected);
    }

    #[test]
    fn already_solved_at_start() {
        let p = Circle::new();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let result = solve(&p, &[r, r], &GlobalConfig::preset_box()).unwrap();
        assert_eq!(result.status, SolveStatus::Converged);
        assert_eq!(result.iterations, 0);
    }

    #[test]
    fn watermark_sequence_is_monotone() {
        let p = Circle::new();
        for memory in [0usize, 1, 3] {
            let config = GlobalConfig {
                memory,
                ..GlobalConfig::preset_box()
            };
            let result = solve(&p, &[0.1, 0.9], &config).unwrap();
            let mut window = HistoryWindow::new(memory);
            let mut last = f64::INFINITY;
            for record in &result.trace {
                window.push(record.f);
                let wm = window.watermark();
                assert!(wm <= last + 1e-15, "watermark increased (M={memory})");
                last = wm;
            }
        }
    }

    #[test]
    fn stationary_without_solving() {
        // F(x) = x - 2 on [0,1]: no feasible root; the merit minimum over
        // the box is at the bound x = 1 where the projected gradient step
        // vanishes.
        struct Infeasible {
            set: FeasibleSet,
        }
        impl NlsProblem for Infeasible {
            fn name(&self) -> &str {
                "infeasible"
            }
            fn residual_dim(&self) -> usize {
                1
            }
            fn var_dim(&self) -> usize {
                1
            }
            fn residual(&self, x: &[f64]) -> Vec<f64> {
                vec![x[0] - 2.0]
            }
            fn jacobian(&self, _x: &[f64]) -> Jacobian {
                Jacobian::Dense(DenseMatrix::from_rows(1, 1, vec![1.0]))
            }
            fn feasible_set(&self) -> &FeasibleSet {
                &self.set
            }
        }
        let p = Infeasible {
            set: FeasibleSet::Box(BoxSet::new(vec![0.0], vec![1.0])),
        };
        let result = solve(&p, &[0.2], &GlobalConfig::preset_box()).unwrap();
        assert_eq!(result.status, SolveStatus::Stationary);
        assert!((result.x[0] - 1.0).abs() < 1e-9);
    }
}
