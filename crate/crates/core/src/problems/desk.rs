//! Small analytic box-constrained problems with known solutions, covering
//! an underdetermined linear system, square scalar and coupled nonlinear
//! systems, and a solution with an active bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::DenseMatrix;
use crate::sets::{BoxSet, FeasibleSet};
use crate::solve::{Jacobian, NlsProblem};

/// Seed for the one randomized desk problem (D1's linear operator).
const DESK_SEED: u64 = 0xD35C;

type ResidualFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type JacobianFn = Box<dyn Fn(&[f64]) -> DenseMatrix + Send + Sync>;

pub struct DeskProblem {
    name: &'static str,
    m: usize,
    n: usize,
    residual_fn: ResidualFn,
    jacobian_fn: JacobianFn,
    set: FeasibleSet,
    solutions: Vec<Vec<f64>>,
    start: Vec<f64>,
}

impl DeskProblem {
    /// A known solution (feasible, with ||F|| <= 1e-12).
    pub fn solutions(&self) -> &[Vec<f64>] {
        &self.solutions
    }

    pub fn recommended_start(&self) -> &[f64] {
        &self.start
    }
}

impl std::fmt::Debug for DeskProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DeskProblem")
            .field("name", &self.name)
            .field("m", &self.m)
            .field("n", &self.n)
            .finish()
    }
}

impl NlsProblem for DeskProblem {
    fn name(&self) -> &str {
        self.name
    }

    fn residual_dim(&self) -> usize {
        self.m
    }

    fn var_dim(&self) -> usize {
        self.n
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        (self.residual_fn)(x)
    }

    fn jacobian(&self, x: &[f64]) -> Jacobian {
        Jacobian::Dense((self.jacobian_fn)(x))
    }

    fn feasible_set(&self) -> &FeasibleSet {
        &self.set
    }
}

/// D1: underdetermined linear system F(x) = A x - b on [-1, 1]^3 with a
/// seeded 2x3 operator and b = A xbar for an interior xbar.
fn d1() -> DeskProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(DESK_SEED);
    let a = DenseMatrix::from_rows(
        2,
        3,
        (0..6).map(|_| rng.random_range(-1.0..1.0)).collect(),
    );
    let xbar = vec![0.3, -0.4, 0.5];
    let b = a.matvec(&xbar);
    let a_res = a.clone();
    let a_jac = a.clone();
    let b_res = b.clone();
    DeskProblem {
        name: "D1",
        m: 2,
        n: 3,
        residual_fn: Box::new(move |x| {
            let mut r = a_res.matvec(x);
            for (ri, bi) in r.iter_mut().zip(&b_res) {
                *ri -= bi;
            }
            r
        }),
        jacobian_fn: Box::new(move |_| a_jac.clone()),
        set: FeasibleSet::Box(BoxSet::new(vec![-1.0; 3], vec![1.0; 3])),
        solutions: vec![xbar],
        start: vec![0.9, 0.9, -0.9],
    }
}

/// D2: scalar F(x) = x on [-1, 1]; the interior root 0.
fn d2() -> DeskProblem {
    DeskProblem {
        name: "D2",
        m: 1,
        n: 1,
        residual_fn: Box::new(|x| vec![x[0]]),
        jacobian_fn: Box::new(|_| DenseMatrix::from_rows(1, 1, vec![1.0])),
        set: FeasibleSet::Box(BoxSet::new(vec![-1.0], vec![1.0])),
        solutions: vec![vec![0.0]],
        start: vec![0.5],
    }
}

/// D3: coupled system (x1^2 + x2^2 - 1, x1 - x2) on [0, 1]^2 with the
/// interior root (sqrt(2)/2, sqrt(2)/2).
fn d3() -> DeskProblem {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    DeskProblem {
        name: "D3",
        m: 2,
        n: 2,
        residual_fn: Box::new(|x| vec![x[0] * x[0] + x[1] * x[1] - 1.0, x[0] - x[1]]),
        jacobian_fn: Box::new(|x| {
            DenseMatrix::from_rows(2, 2, vec![2.0 * x[0], 2.0 * x[1], 1.0, -1.0])
        }),
        set: FeasibleSet::Box(BoxSet::new(vec![0.0, 0.0], vec![1.0, 1.0])),
        solutions: vec![vec![r, r]],
        start: vec![1.0, 0.0],
    }
}

/// D4: (x1 x2 - 1/2, x1^2 - 1/4) on [0, 1]^2; the root (1/2, 1) sits on
/// the upper bound of x2.
fn d4() -> DeskProblem {
    DeskProblem {
        name: "D4",
        m: 2,
        n: 2,
        residual_fn: Box::new(|x| vec![x[0] * x[1] - 0.5, x[0] * x[0] - 0.25]),
        jacobian_fn: Box::new(|x| DenseMatrix::from_rows(2, 2, vec![x[1], x[0], 2.0 * x[0], 0.0])),
        set: FeasibleSet::Box(BoxSet::new(vec![0.0, 0.0], vec![1.0, 1.0])),
        solutions: vec![vec![0.5, 1.0]],
        start: vec![0.8, 0.8],
    }
}

pub fn desk_suite() -> Vec<DeskProblem> {
    vec![d1(), d2(), d3(), d4()]
}

pub fn desk_by_name(name: &str) -> Option<DeskProblem> {
    match name {
        "D1" => Some(d1()),
        "D2" => Some(d2()),
        "D3" => Some(d3()),
        "D4" => Some(d4()),
        _ => None,
    }
}
