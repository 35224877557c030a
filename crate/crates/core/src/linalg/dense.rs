//! Matrix storage types: dense row-major, full symmetric, and sparse-row.

use crate::par;

use super::vec;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Build from row-major entries. Panics if the length does not match.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must be rows*cols");
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn frobenius_norm(&self) -> f64 {
        vec::norm2(&self.data)
    }

    /// y = A x
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![0.0; self.rows];
        par::fill_indexed(&mut y, self.cols, |i| vec::dot(self.row(i), x));
        y
    }

    /// y = A^T x
    pub fn t_matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        let mut y = vec![0.0; self.cols];
        for (i, xi) in x.iter().enumerate() {
            vec::axpy(*xi, self.row(i), &mut y);
        }
        y
    }
}

/// Full-storage symmetric matrix; `entries[i,j] == entries[j,i]` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    /// Build from full row-major entries, symmetrizing exactly: both (i,j)
    /// and (j,i) receive the identical value (a_ij + a_ji) / 2.
    pub fn from_full(dim: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), dim * dim);
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                let v = 0.5 * (data[i * dim + j] + data[j * dim + i]);
                m.set_sym(i, j, v);
            }
        }
        m
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set_sym(i, i, 1.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Write both (i,j) and (j,i).
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        vec::norm2(&self.data)
    }

    /// Frobenius inner product <A, B>.
    pub fn frobenius_dot(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        vec::dot(&self.data, &other.data)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        let mut y = vec![0.0; self.dim];
        par::fill_indexed(&mut y, self.dim, |i| vec::dot(self.row(i), x));
        y
    }

    /// A - B
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: vec::sub(&self.data, &other.data),
        }
    }

    /// sum_k w_k * v_k v_k^T for column vectors `vs[k]` of length `dim`.
    ///
    /// Skips zero weights, so the cost is O(dim^2 * support).
    pub fn from_weighted_outer(dim: usize, weights: &[f64], vs: &[Vec<f64>]) -> Self {
        assert_eq!(weights.len(), vs.len());
        let mut m = Self::zeros(dim);
        let active: Vec<usize> = (0..weights.len()).filter(|&k| weights[k] != 0.0).collect();
        par::for_each_row(&mut m.data, dim, |i, row| {
            for &k in &active {
                let w = weights[k] * vs[k][i];
                vec::axpy(w, &vs[k], row);
            }
        });
        m
    }
}

/// Sparse matrix stored as rows of (column, value) pairs, columns ascending.
///
/// Used for Jacobians with structured rows where a dense representation
/// would be prohibitively large.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRowMat {
    rows: Vec<Vec<(usize, f64)>>,
    cols: usize,
}

impl SparseRowMat {
    pub fn new(rows: Vec<Vec<(usize, f64)>>, cols: usize) -> Self {
        for r in &rows {
            debug_assert!(r.windows(2).all(|w| w[0].0 < w[1].0));
            debug_assert!(r.iter().all(|&(j, _)| j < cols));
        }
        Self { rows, cols }
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn is_finite(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.iter().all(|&(_, v)| v.is_finite()))
    }

    /// y = A x
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(j, v)| v * x[j]).sum())
            .collect()
    }

    /// y = A^T x
    pub fn t_matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows.len());
        let mut y = vec![0.0; self.cols];
        for (r, xi) in self.rows.iter().zip(x) {
            for &(j, v) in r {
                y[j] += v * xi;
            }
        }
        y
    }

    /// Dense Gram matrix A A^T (rows x rows).
    pub fn gram(&self) -> SymMatrix {
        let m = self.rows.len();
        let mut g = SymMatrix::zeros(m);
        for i in 0..m {
            for j in i..m {
                g.set_sym(i, j, sparse_dot(&self.rows[i], &self.rows[j]));
            }
        }
        g
    }

    /// Largest squared row norm; cheap upper-bound proxy for ||A||^2.
    pub fn max_row_norm_sq(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(_, v)| v * v).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

fn sparse_dot(a: &[(usize, f64)], b: &[(usize, f64)]) -> f64 {
    let (mut ia, mut ib, mut acc) = (0, 0, 0.0);
    while ia < a.len() && ib < b.len() {
        match a[ia].0.cmp(&b[ib].0) {
            std::cmp::Ordering::Less => ia += 1,
            std::cmp::Ordering::Greater => ib += 1,
            std::cmp::Ordering::Equal => {
                acc += a[ia].1 * b[ib].1;
                ia += 1;
                ib += 1;
            }
        }
    }
    acc
}
