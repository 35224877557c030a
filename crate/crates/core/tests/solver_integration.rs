//! Cross-module solver checks: frozen goldens on generated instances, the
//! zero-theta equivalence with an independently written projected-LM loop,
//! rate-band observations, and the eps = 0 recovery of the CondG oracle.

use lmproj_core::linalg::{solve_lm_system, vec, DenseMatrix};
use lmproj_core::problems::{desk_by_name, gen_spectra_instance, spectra_start};
use lmproj_core::sets::{condg_project, FeasibleSet, ProjectionMode, SimplexSet};
use lmproj_core::solve::{
    local, LocalConfig, NlsProblem, ProjectionConfig, SolveStatus, ThetaSchedule,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn local_spectra_golden() {
    // Frozen behavior: n=50, m=20, q=4, seed 1, theta = 0, barycenter start.
    let inst = gen_spectra_instance(50, 20, 4, 1).unwrap();
    let config = LocalConfig {
        theta: ThetaSchedule::Zero,
        tol_f: 1e-7,
        max_iters: 50,
        projection: ProjectionConfig::default(),
    };
    let r = local::solve(&inst, &spectra_start(50, 0.0), &config).unwrap();
    assert_eq!(r.status, SolveStatus::Converged);
    assert!(r.iterations <= 8, "took {} iterations", r.iterations);
    assert!(r.final_norm_f() <= 1e-7);
    // Every iterate stays feasible.
    assert!(r.trace.iter().all(|t| t.infeas <= 1e-10));
}

#[test]
fn local_inexact_rate_stays_in_linear_band() {
    // theta = 0.9 with the rank-p oracle: near convergence the residual
    // ratios sit in a linear band and never collapse superlinearly.
    let inst = gen_spectra_instance(50, 20, 4, 1).unwrap();
    let config = LocalConfig {
        theta: ThetaSchedule::Constant(0.9),
        tol_f: 1e-7,
        max_iters: 60,
        projection: ProjectionConfig {
            mode: ProjectionMode::FwP,
            initial_rank: 1,
            ..ProjectionConfig::default()
        },
    };
    let r = local::solve(&inst, &spectra_start(50, 0.0), &config).unwrap();
    assert_eq!(r.status, SolveStatus::Converged);
    let ratios: Vec<f64> = r
        .trace
        .windows(2)
        .map(|w| w[1].norm_f / w[0].norm_f)
        .collect();
    assert!(ratios.len() >= 4);
    let tail = &ratios[ratios.len() - 4..];
    for r in tail {
        assert!(*r > 0.05 && *r < 0.95, "ratio {r} outside the linear band");
    }
    for w in tail.windows(2) {
        assert!(w[1] >= w[0] / 5.0, "superlinear drop in the tail: {w:?}");
    }
}

/// Independent projected-LM reference: evaluate, solve the regularized
/// system by the augmented QR kernel, step, clamp. Written without the
/// solver machinery; with theta = 0 and a closed-form projector the
/// production loop must match it bit for bit.
fn reference_projected_lm(
    problem: &dyn NlsProblem,
    x0: &[f64],
    tol: f64,
    max_iters: usize,
) -> Vec<Vec<f64>> {
    let set = problem.feasible_set();
    let clamp = |x: &[f64]| match set {
        FeasibleSet::Box(b) => b.clamp(x),
        _ => panic!("reference loop only handles boxes"),
    };
    let mut x = x0.to_vec();
    let mut iterates = vec![x.clone()];
    for _ in 0..max_iters {
        let f = problem.residual(&x);
        let nf = vec::norm2(&f);
        if nf <= tol {
            break;
        }
        let jac = match problem.jacobian(&x) {
            lmproj_core::solve::Jacobian::Dense(j) => j,
            _ => panic!("desk problems are dense"),
        };
        let d = solve_lm_system(&jac, &f, nf * nf).unwrap();
        x = clamp(&vec::add(&x, &d));
        iterates.push(x.clone());
    }
    iterates
}

#[test]
fn zero_theta_matches_independent_reference_bitwise() {
    for name in ["D1", "D3", "D4"] {
        let p = desk_by_name(name).unwrap();
        let config = LocalConfig {
            theta: ThetaSchedule::Zero,
            tol_f: 1e-9,
            max_iters: 40,
            projection: ProjectionConfig::default(),
        };
        let r = local::solve(&p, p.recommended_start(), &config).unwrap();
        let reference = reference_projected_lm(&p, p.recommended_start(), 1e-9, 40);
        assert_eq!(r.trace.len(), reference.len(), "{name}: iterate counts");
        // Final iterates agree exactly; intermediate norms agree exactly.
        assert_eq!(r.x, *reference.last().unwrap(), "{name}: final iterate");
        for (rec, xref) in r.trace.iter().zip(&reference) {
            let nf = vec::norm2(&p.residual(xref));
            assert_eq!(rec.norm_f, nf, "{name}: norm at k={}", rec.k);
        }
    }
}

#[test]
fn condg_eps_zero_recovers_exact_projection_on_simplex() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for _ in 0..50 {
        let n = rng.random_range(2..=5);
        let set = FeasibleSet::Simplex(SimplexSet::new(n));
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.5)).collect();
        let exact = set.exact_project(&x).unwrap();
        // Face-interior projections converge at O(1/t), so reaching 1e-6
        // takes a few million linear minimization calls.
        let out = condg_project(&set, &x, 0.0, 10_000_000).unwrap();
        assert!(
            vec::dist(&out.point, &exact) <= 1e-6,
            "eps=0 recovery failed at {x:?}: dist {}",
            vec::dist(&out.point, &exact)
        );
    }
}

#[test]
fn geometric_theta_schedule_drives_eps_to_zero() {
    let inst = gen_spectra_instance(30, 14, 3, 2).unwrap();
    let config = LocalConfig {
        theta: ThetaSchedule::Geometric {
            theta0: 0.9,
            rho: 0.5,
        },
        tol_f: 1e-8,
        max_iters: 60,
        projection: ProjectionConfig {
            mode: ProjectionMode::FwP,
            initial_rank: 1,
            ..ProjectionConfig::default()
        },
    };
    let r = local::solve(&inst, &spectra_start(30, 0.0), &config).unwrap();
    assert_eq!(r.status, SolveStatus::Converged);
    assert!(r.final_norm_f() <= 1e-8);
}

#[test]
fn dense_qr_lm_solve_conditioning() {
    // The augmented QR path stays accurate on an ill-conditioned Jacobian
    // where explicit normal equations would lose half the digits.
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (m, n) = (30usize, 12usize);
    let mut data = vec![0.0; m * n];
    for (idx, v) in data.iter_mut().enumerate() {
        let col = idx % n;
        let scale = 10f64.powi(-(col as i32) / 2); // columns shrink to 1e-5
        *v = scale * rng.random_range(-1.0..1.0);
    }
    let j = DenseMatrix::from_rows(m, n, data);
    let f: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mu = 1e-12;
    let d = solve_lm_system(&j, &f, mu).unwrap();
    // Check the normal equations residual directly.
    let jd = j.matvec(&d);
    let mut r = j.t_matvec(&jd);
    vec::axpy(mu, &d, &mut r);
    let jtf = j.t_matvec(&f);
    vec::axpy(1.0, &jtf, &mut r);
    assert!(vec::norm2(&r) <= 1e-8 * (1.0 + vec::norm2(&jtf)));
}
