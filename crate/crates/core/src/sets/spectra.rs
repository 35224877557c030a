//! The spectrahedron { X symmetric : X >= 0, trace X = 1 } and its svec
//! embedding.
//!
//! Points are embedded isometrically into R^{n(n+1)/2} by packing the upper
//! triangle column by column with off-diagonal entries scaled by sqrt(2),
//! so Frobenius inner products of matrices equal Euclidean inner products
//! of embeddings and the solvers never special-case matrix variables.

use crate::linalg::{self, project_simplex, sym_eig_full, sym_eig_topk, SymMatrix};

use super::SetError;

/// Embedding dimension n(n+1)/2.
pub fn svec_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Position of the (i, j) upper-triangle entry (i <= j) in the embedding.
pub fn svec_index(i: usize, j: usize) -> usize {
    debug_assert!(i <= j);
    j * (j + 1) / 2 + i
}

const SQRT2: f64 = std::f64::consts::SQRT_2;

#[derive(Debug, Clone)]
pub struct SpectrahedronSet {
    n: usize,
}

impl SpectrahedronSet {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        Self { n }
    }

    /// Matrix dimension n.
    pub fn matrix_dim(&self) -> usize {
        self.n
    }

    pub fn embed_dim(&self) -> usize {
        svec_dim(self.n)
    }

    pub fn svec(&self, x: &SymMatrix) -> Vec<f64> {
        assert_eq!(x.dim(), self.n);
        let mut out = vec![0.0; self.embed_dim()];
        for j in 0..self.n {
            for i in 0..=j {
                let v = x.get(i, j);
                out[svec_index(i, j)] = if i == j { v } else { SQRT2 * v };
            }
        }
        out
    }

    pub fn unsvec(&self, v: &[f64]) -> SymMatrix {
        assert_eq!(v.len(), self.embed_dim());
        let mut m = SymMatrix::zeros(self.n);
        for j in 0..self.n {
            for i in 0..=j {
                let e = v[svec_index(i, j)];
                m.set_sym(i, j, if i == j { e } else { e / SQRT2 });
            }
        }
        m
    }

    /// Barycenter I/n in embedded form.
    pub fn barycenter(&self) -> Vec<f64> {
        let mut m = SymMatrix::zeros(self.n);
        for i in 0..self.n {
            m.set_sym(i, i, 1.0 / self.n as f64);
        }
        self.svec(&m)
    }

    /// Membership within `tol` on the trace and within max(tol, 1e-8) on
    /// the smallest eigenvalue, the slack reflecting eigensolver accuracy.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        let m = self.unsvec(x);
        if (m.trace() - 1.0).abs() > tol {
            return false;
        }
        self.min_eigenvalue_estimate(&m) >= -tol.max(1e-8)
    }

    /// |trace - 1| plus the negative-eigenvalue excess; 0 for members.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let m = self.unsvec(x);
        let tdev = (m.trace() - 1.0).abs();
        let lmin = self.min_eigenvalue_estimate(&m);
        tdev + (-lmin).max(0.0)
    }

    /// Best-effort smallest eigenvalue: the Lanczos estimate on -X is a
    /// diagnostic here, so a budget miss returns the looser full-solve
    /// value rather than an error.
    fn min_eigenvalue_estimate(&self, m: &SymMatrix) -> f64 {
        let neg = SymMatrix::from_weighted_outer(self.n, &[], &[]).sub(m);
        match sym_eig_topk(&neg, 1) {
            Ok(pairs) => -pairs[0].value,
            Err(_) => f64::NEG_INFINITY,
        }
    }

    /// Exact projection Q P_simplex(Lambda) Q^T from the full spectral
    /// decomposition of the embedded matrix.
    pub fn exact_project(&self, x: &[f64]) -> Result<Vec<f64>, SetError> {
        let m = self.unsvec(x);
        let pairs = sym_eig_full(&m)?;
        let vals: Vec<f64> = pairs.iter().map(|p| p.value).collect();
        let w = project_simplex(&vals)?;
        let vecs: Vec<Vec<f64>> = pairs.into_iter().map(|p| p.vector).collect();
        let proj = SymMatrix::from_weighted_outer(self.n, &w, &vecs);
        Ok(self.svec(&proj))
    }

    /// argmin_{Z in S} <G, Z> = v v^T for v the eigenvector of the
    /// smallest eigenvalue of G.
    pub fn linear_minimizer(&self, g: &[f64]) -> Result<Vec<f64>, SetError> {
        let m = self.unsvec(g);
        let neg = SymMatrix::zeros(self.n).sub(&m);
        let top = sym_eig_topk(&neg, 1).map_err(linalg_err)?;
        let v = &top[0].vector;
        let z = SymMatrix::from_weighted_outer(self.n, &[1.0], &[v.clone()]);
        Ok(self.svec(&z))
    }
}

fn linalg_err(e: linalg::LinalgError) -> SetError {
    SetError::Linalg(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vec;

    fn diag_sym(vals: &[f64]) -> SymMatrix {
        let mut m = SymMatrix::zeros(vals.len());
        for (i, v) in vals.iter().enumerate() {
            m.set_sym(i, i, *v);
        }
        m
    }

    #[test]
    fn svec_is_isometric() {
        let s = SpectrahedronSet::new(3);
        let a = SymMatrix::from_full(3, &[1.0, 2.0, 0.5, 2.0, -1.0, 0.25, 0.5, 0.25, 3.0]);
        let b = SymMatrix::from_full(3, &[0.5, 1.0, -2.0, 1.0, 2.0, 0.0, -2.0, 0.0, 1.5]);
        let fa = s.svec(&a);
        let fb = s.svec(&b);
        assert!((vec::dot(&fa, &fb) - a.frobenius_dot(&b)).abs() < 1e-12);
        let back = s.unsvec(&fa);
        assert!(back.sub(&a).frobenius_norm() < 1e-15);
    }

    #[test]
    fn exact_projection_fixed_points() {
        let s = SpectrahedronSet::new(3);
        // Already feasible.
        let y = s.svec(&diag_sym(&[0.5, 0.5, 0.0]));
        let p = s.exact_project(&y).unwrap();
        assert!(vec::dist(&p, &y) < 1e-12);
        // diag(2,0,0) projects to e1 e1^T.
        let y2 = s.svec(&diag_sym(&[2.0, 0.0, 0.0]));
        let p2 = s.exact_project(&y2).unwrap();
        let expect = s.svec(&diag_sym(&[1.0, 0.0, 0.0]));
        assert!(vec::dist(&p2, &expect) < 1e-12);
        // Barycenter is a fixed point.
        let b = s.barycenter();
        let pb = s.exact_project(&b).unwrap();
        assert!(vec::dist(&pb, &b) < 1e-12);
    }

    #[test]
    fn membership_and_violation() {
        let s = SpectrahedronSet::new(4);
        let set = &s;
        assert!(set.contains(&s.barycenter(), 1e-10));
        let bad = s.svec(&diag_sym(&[1.5, -0.5, 0.0, 0.0]));
        assert!(!set.contains(&bad, 1e-10));
        assert!(set.violation(&bad) > 0.4);
        assert!(set.violation(&s.barycenter()) < 1e-9);
    }

    #[test]
    fn lmo_picks_smallest_eigen_direction() {
        let s = SpectrahedronSet::new(3);
        let g = s.svec(&diag_sym(&[3.0, 2.0, -1.0]));
        let z = s.linear_minimizer(&g).unwrap();
        let expect = s.svec(&diag_sym(&[0.0, 0.0, 1.0]));
        assert!(vec::dist(&z, &expect) < 1e-8);
        // The LMO value <g, z> equals the smallest eigenvalue.
        assert!((vec::dot(&g, &z) + 1.0).abs() < 1e-8);
    }
}
