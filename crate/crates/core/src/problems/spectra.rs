//! Generated affine systems over the spectrahedron.
//!
//! An instance plants X* = Q_q diag(1/q, ..., 1/q) Q_q^T for a seeded
//! random orthonormal q-frame Q_q, samples the m largest upper-triangle
//! entries of X* as the measurement positions, and defines
//! F(X)_l = <A_l, X> - b_l with A_l = (e_i e_j^T + e_j e_i^T) / 2 and
//! b_l = <A_l, X*>. In svec coordinates each residual row has a single
//! nonzero, so the Jacobian is sparse and constant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{vec, SparseRowMat, SymMatrix};
use crate::sets::{svec_index, FeasibleSet, SpectrahedronSet};
use crate::solve::{Jacobian, NlsProblem};

use super::ProblemError;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// One generated instance. The planted solution satisfies F(X*) = 0
/// exactly because b is evaluated through the instance's own residual rows.
#[derive(Debug, Clone)]
pub struct SpectraInstance {
    name: String,
    n: usize,
    m: usize,
    q: usize,
    seed: u64,
    pairs: Vec<(usize, usize)>,
    b: Vec<f64>,
    basis: Vec<Vec<f64>>,
    x_star: SymMatrix,
    jac: SparseRowMat,
    set: FeasibleSet,
}

impl SpectraInstance {
    pub fn matrix_dim(&self) -> usize {
        self.n
    }

    pub fn equations(&self) -> usize {
        self.m
    }

    pub fn planted_rank(&self) -> usize {
        self.q
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    /// Orthonormal columns spanning the planted eigenspace.
    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn x_star(&self) -> &SymMatrix {
        &self.x_star
    }

    pub fn x_star_svec(&self) -> Vec<f64> {
        self.spectrahedron().svec(&self.x_star)
    }

    pub fn spectrahedron(&self) -> &SpectrahedronSet {
        match &self.set {
            FeasibleSet::Spectrahedron(s) => s,
            _ => unreachable!("instance set is always the spectrahedron"),
        }
    }

    /// Rebuild from stored parts (used by the instance file reader).
    pub(crate) fn from_parts(
        n: usize,
        m: usize,
        q: usize,
        seed: u64,
        pairs: Vec<(usize, usize)>,
        b: Vec<f64>,
        basis: Vec<Vec<f64>>,
    ) -> Result<Self, ProblemError> {
        validate_dims(n, m, q)?;
        if pairs.len() != m || b.len() != m || basis.len() != q {
            return Err(ProblemError::InvalidDims(
                "stored section lengths disagree with the header".into(),
            ));
        }
        let weights = vec![1.0 / q as f64; q];
        let x_star = SymMatrix::from_weighted_outer(n, &weights, &basis);
        let jac = residual_rows(&pairs, n);
        Ok(Self {
            name: format!("spectra:{n},{m},{q},{seed}"),
            n,
            m,
            q,
            seed,
            pairs,
            b,
            basis,
            x_star,
            jac,
            set: FeasibleSet::Spectrahedron(SpectrahedronSet::new(n)),
        })
    }
}

impl NlsProblem for SpectraInstance {
    fn name(&self) -> &str {
        &self.name
    }

    fn residual_dim(&self) -> usize {
        self.m
    }

    fn var_dim(&self) -> usize {
        self.set.dim()
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut out = self.jac.matvec(x);
        for (oi, bi) in out.iter_mut().zip(&self.b) {
            *oi -= bi;
        }
        out
    }

    fn jacobian(&self, _x: &[f64]) -> Jacobian {
        Jacobian::Sparse(self.jac.clone())
    }

    fn feasible_set(&self) -> &FeasibleSet {
        &self.set
    }
}

fn validate_dims(n: usize, m: usize, q: usize) -> Result<(), ProblemError> {
    if n < 1 || q < 1 || q > n {
        return Err(ProblemError::InvalidDims(format!(
            "need 1 <= q <= n, got n={n}, q={q}"
        )));
    }
    let max_m = n * (n + 1) / 2;
    if m < 1 || m > max_m {
        return Err(ProblemError::InvalidDims(format!(
            "need 1 <= m <= n(n+1)/2 = {max_m}, got m={m}"
        )));
    }
    Ok(())
}

/// Sidelobe energy of the planted eigenvectors. A fully delocalized (Haar)
/// eigenbasis spreads X* over O(n^2) entries of size O(1/n); m samples of
/// such entries carry almost no mass, every trial point projects to a
/// near-full-rank matrix, and both the low-rank projection shortcut and
/// the fast local rate disappear. Localized eigenvectors concentrate X*
/// on a few significant entries, which is the regime the rank-p projector
/// is built for.
const SIDELOBE: f64 = 0.07;

/// Generate an instance. Identical arguments produce bit-identical
/// instances; the generator is ChaCha8 seeded with `seed`.
pub fn gen_spectra_instance(
    n: usize,
    m: usize,
    q: usize,
    seed: u64,
) -> Result<SpectraInstance, ProblemError> {
    validate_dims(n, m, q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Random orthonormal q-frame, localized: each vector is a distinct
    // random coordinate anchor plus Gaussian sidelobes, orthonormalized by
    // Gram-Schmidt (the positive-norm normalization fixes the signs).
    let mut anchors: Vec<usize> = Vec::with_capacity(q);
    while anchors.len() < q {
        let a = rng.random_range(0..n);
        if !anchors.contains(&a) {
            anchors.push(a);
        }
    }
    let scale = SIDELOBE / (n as f64).sqrt();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(q);
    while basis.len() < q {
        let anchor = anchors[basis.len()];
        let mut v: Vec<f64> = (0..n)
            .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        v[anchor] += 1.0;
        for u in &basis {
            let c = vec::dot(&v, u);
            vec::axpy(-c, u, &mut v);
        }
        let nv = vec::norm2(&v);
        if nv < 1e-8 {
            continue; // essentially impossible; redraw
        }
        vec::scale(1.0 / nv, &mut v);
        basis.push(v);
    }

    let weights = vec![1.0 / q as f64; q];
    let x_star = SymMatrix::from_weighted_outer(n, &weights, &basis);

    let pairs = largest_upper_entries(&x_star, m);
    let jac = residual_rows(&pairs, n);
    let sp = SpectrahedronSet::new(n);
    // b through the same rows that evaluate the residual, so F(X*) is
    // exactly zero.
    let b = jac.matvec(&sp.svec(&x_star));

    Ok(SpectraInstance {
        name: format!("spectra:{n},{m},{q},{seed}"),
        n,
        m,
        q,
        seed,
        pairs,
        b,
        basis,
        x_star,
        jac,
        set: FeasibleSet::Spectrahedron(sp),
    })
}

/// The `count` largest upper-triangle entries (i <= j) of `x` by value,
/// ties broken lexicographically by (i, j).
pub(crate) fn largest_upper_entries(x: &SymMatrix, count: usize) -> Vec<(usize, usize)> {
    let n = x.dim();
    let mut entries: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .collect();
    entries.sort_by(|&(ai, aj), &(bi, bj)| {
        x.get(bi, bj)
            .partial_cmp(&x.get(ai, aj))
            .expect("finite entries")
            .then(ai.cmp(&bi))
            .then(aj.cmp(&bj))
    });
    entries.truncate(count);
    entries
}

/// Constant Jacobian rows: row l has the single svec coordinate of its
/// (i, j) pair, with coefficient 1 on the diagonal and 1/sqrt(2) off it
/// (the svec entry is sqrt(2) X_ij, and <A_l, X> = X_ij).
fn residual_rows(pairs: &[(usize, usize)], n: usize) -> SparseRowMat {
    let cols = n * (n + 1) / 2;
    let rows = pairs
        .iter()
        .map(|&(i, j)| {
            let coeff = if i == j { 1.0 } else { 1.0 / SQRT2 };
            vec![(svec_index(i, j), coeff)]
        })
        .collect();
    SparseRowMat::new(rows, cols)
}

/// Starting family X_0 = (1 - a) I/n + a e_1 e_1^T in svec coordinates,
/// sweeping from the barycenter (a = 0) to an extreme point (a = 1).
pub fn spectra_start(n: usize, a: f64) -> Vec<f64> {
    assert!((0.0..=1.0).contains(&a), "need a in [0, 1]");
    let mut x = SymMatrix::zeros(n);
    for i in 0..n {
        x.set_sym(i, i, (1.0 - a) / n as f64);
    }
    x.set_sym(0, 0, x.get(0, 0) + a);
    SpectrahedronSet::new(n).svec(&x)
}
