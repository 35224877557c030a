//! Problem abstraction: residual map, Jacobian, and attached feasible set.

use crate::linalg::{
    check_finite, solve_lm_system, solve_lm_system_sparse, vec, DenseMatrix, SparseRowMat,
};
use crate::sets::FeasibleSet;

use super::SolverError;

/// Jacobian in whichever representation the problem can afford. Structured
/// problems with very wide Jacobians return sparse rows so the regularized
/// solve can go through the small dual system instead of an n x n
/// factorization.
#[derive(Debug, Clone)]
pub enum Jacobian {
    Dense(DenseMatrix),
    Sparse(SparseRowMat),
}

impl Jacobian {
    pub fn rows(&self) -> usize {
        match self {
            Jacobian::Dense(j) => j.rows(),
            Jacobian::Sparse(j) => j.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Jacobian::Dense(j) => j.cols(),
            Jacobian::Sparse(j) => j.cols(),
        }
    }

    /// J^T y
    pub fn t_matvec(&self, y: &[f64]) -> Vec<f64> {
        match self {
            Jacobian::Dense(j) => j.t_matvec(y),
            Jacobian::Sparse(j) => j.t_matvec(y),
        }
    }

    /// J x
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Jacobian::Dense(j) => j.matvec(x),
            Jacobian::Sparse(j) => j.matvec(x),
        }
    }

    /// Solve (J^T J + mu I) d = -J^T F: augmented-matrix QR for the dense
    /// representation, the equivalent dual solve for sparse rows.
    pub fn lm_solve(&self, residual: &[f64], mu: f64) -> Result<Vec<f64>, SolverError> {
        let d = match self {
            Jacobian::Dense(j) => solve_lm_system(j, residual, mu)?,
            Jacobian::Sparse(j) => solve_lm_system_sparse(j, residual, mu)?,
        };
        Ok(d)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            Jacobian::Dense(m) => m.get(i, j),
            Jacobian::Sparse(m) => m
                .row(i)
                .iter()
                .find(|&&(c, _)| c == j)
                .map(|&(_, v)| v)
                .unwrap_or(0.0),
        }
    }
}

/// A constrained nonlinear system F(x) = 0, x in C.
pub trait NlsProblem: Send + Sync {
    fn name(&self) -> &str;
    /// Residual dimension m.
    fn residual_dim(&self) -> usize;
    /// Variable dimension n (embedding dimension for matrix variables).
    fn var_dim(&self) -> usize;
    fn residual(&self, x: &[f64]) -> Vec<f64>;
    fn jacobian(&self, x: &[f64]) -> Jacobian;
    fn feasible_set(&self) -> &FeasibleSet;
}

/// Merit value and gradient: f(x) = ||F(x)||^2 / 2, grad f = J(x)^T F(x).
pub fn merit_and_gradient(
    problem: &dyn NlsProblem,
    x: &[f64],
) -> Result<(f64, Vec<f64>), SolverError> {
    check_finite(x).map_err(|_| SolverError::NonFinite)?;
    let f = problem.residual(x);
    check_finite(&f).map_err(|_| SolverError::NonFinite)?;
    let j = problem.jacobian(x);
    let grad = j.t_matvec(&f);
    check_finite(&grad).map_err(|_| SolverError::NonFinite)?;
    let nf = vec::norm2(&f);
    Ok((0.5 * nf * nf, grad))
}

/// Compare the analytic Jacobian against central finite differences with
/// h_i = 1e-6 (1 + |x_i|). Returns the relative Frobenius error
/// ||J - J_fd||_F / (1 + ||J_fd||_F).
pub fn check_jacobian_fd(problem: &dyn NlsProblem, x: &[f64]) -> f64 {
    let m = problem.residual_dim();
    let n = problem.var_dim();
    let jac = problem.jacobian(x);
    let mut diff_sq = 0.0;
    let mut fd_sq = 0.0;
    let mut xp = x.to_vec();
    for i in 0..n {
        let h = 1e-6 * (1.0 + x[i].abs());
        xp[i] = x[i] + h;
        let fp = problem.residual(&xp);
        xp[i] = x[i] - h;
        let fm = problem.residual(&xp);
        xp[i] = x[i];
        for r in 0..m {
            let fd = (fp[r] - fm[r]) / (2.0 * h);
            let d = jac.get(r, i) - fd;
            diff_sq += d * d;
            fd_sq += fd * fd;
        }
    }
    diff_sq.sqrt() / (1.0 + fd_sq.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::BoxSet;

    struct Quadratic {
        set: FeasibleSet,
    }

    impl NlsProblem for Quadratic {
        fn name(&self) -> &str {
            "quadratic"
        }
        fn residual_dim(&self) -> usize {
            2
        }
        fn var_dim(&self) -> usize {
            2
        }
        fn residual(&self, x: &[f64]) -> Vec<f64> {
            vec![x[0] * x[0], x[1]]
        }
        fn jacobian(&self, x: &[f64]) -> Jacobian {
            Jacobian::Dense(DenseMatrix::from_rows(
                2,
                2,
                vec![2.0 * x[0], 0.0, 0.0, 1.0],
            ))
        }
        fn feasible_set(&self) -> &FeasibleSet {
            &self.set
        }
    }

    fn quadratic() -> Quadratic {
        Quadratic {
            set: FeasibleSet::Box(BoxSet::new(vec![-10.0, -10.0], vec![10.0, 10.0])),
        }
    }

    #[test]
    fn merit_examples() {
        // F(x) = x at x = (3,4): f = 12.5, grad = (3,4).
        struct Identity {
            set: FeasibleSet,
        }
        impl NlsProblem for Identity {
            fn name(&self) -> &str {
                "id"
            }
            fn residual_dim(&self) -> usize {
                2
            }
            fn var_dim(&self) -> usize {
                2
            }
            fn residual(&self, x: &[f64]) -> Vec<f64> {
                x.to_vec()
            }
            fn jacobian(&self, _x: &[f64]) -> Jacobian {
                Jacobian::Dense(DenseMatrix::from_rows(2, 2, vec![1.0, 0.0, 0.0, 1.0]))
            }
            fn feasible_set(&self) -> &FeasibleSet {
                &self.set
            }
        }
        let p = Identity {
            set: FeasibleSet::Box(BoxSet::new(vec![-9.0, -9.0], vec![9.0, 9.0])),
        };
        let (f, g) = merit_and_gradient(&p, &[3.0, 4.0]).unwrap();
        assert!((f - 12.5).abs() < 1e-14);
        assert_eq!(g, vec![3.0, 4.0]);
        let (f0, g0) = merit_and_gradient(&p, &[0.0, 0.0]).unwrap();
        assert_eq!(f0, 0.0);
        assert_eq!(g0, vec![0.0, 0.0]);
    }

    #[test]
    fn merit_chain_rule_example() {
        // F(x) = (x1^2, x2) at (1,2): f = 2.5, grad = (2,2).
        let p = quadratic();
        let (f, g) = merit_and_gradient(&p, &[1.0, 2.0]).unwrap();
        assert!((f - 2.5).abs() < 1e-14);
        assert!((g[0] - 2.0).abs() < 1e-14);
        assert!((g[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn finite_difference_check() {
        let p = quadratic();
        assert!(check_jacobian_fd(&p, &[0.7, -0.3]) <= 1e-6);
    }

    #[test]
    fn sparse_jacobian_entry_lookup() {
        let j = Jacobian::Sparse(SparseRowMat::new(vec![vec![(1, 2.5)], vec![]], 3));
        assert_eq!(j.get(0, 1), 2.5);
        assert_eq!(j.get(0, 0), 0.0);
        assert_eq!(j.get(1, 2), 0.0);
    }
}
