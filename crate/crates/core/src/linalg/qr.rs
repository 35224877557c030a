//! Least-squares solves for the regularized Levenberg-Marquardt system
//!
//!     (J^T J + mu I) d = -J^T F,   mu > 0.
//!
//! The dense path factors the augmented matrix [J; sqrt(mu) I] by Householder
//! QR instead of forming the normal equations, which keeps the solve stable
//! when J is ill conditioned. For sparse Jacobians with many more columns
//! than rows the equivalent dual system (J J^T + mu I) y = F is solved by
//! Cholesky and d = -J^T y recovered, which avoids materializing an
//! n x n factorization.

use super::{check_finite, vec, DenseMatrix, LinalgError, SparseRowMat, SymMatrix};

/// Minimize ||A x - b|| over x for A (m x n) with m >= n and full column
/// rank, by Householder QR without pivoting.
pub fn householder_lstsq(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let (m, n) = (a.rows(), a.cols());
    assert!(m >= n, "need at least as many rows as columns");
    assert_eq!(b.len(), m);
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    check_finite(b)?;

    // Column-major working copy so each reflector touches contiguous memory.
    let mut q = vec![0.0; m * n];
    for j in 0..n {
        for i in 0..m {
            q[j * m + i] = a.get(i, j);
        }
    }
    let mut rhs = b.to_vec();

    for k in 0..n {
        // Householder vector for column k, rows k..m.
        let col = &q[k * m..(k + 1) * m];
        let norm = vec::norm2(&col[k..]);
        if norm == 0.0 {
            return Err(LinalgError::NotSpd);
        }
        let alpha = if col[k] >= 0.0 { -norm } else { norm };
        let mut v = col[k..].to_vec();
        v[0] -= alpha;
        let vtv = vec::dot(&v, &v);
        if vtv == 0.0 {
            // Column already reduced.
            q[k * m + k] = alpha;
            continue;
        }
        q[k * m + k] = alpha;
        for (i, vi) in v.iter().enumerate().skip(1) {
            q[k * m + k + i] = *vi; // keep reflector below the diagonal (unused afterwards)
        }
        let beta = 2.0 / vtv;
        for j in k + 1..n {
            let cj = &mut q[j * m..(j + 1) * m];
            let s = beta * vec::dot(&v, &cj[k..]);
            vec::axpy(-s, &v, &mut cj[k..]);
        }
        let s = beta * vec::dot(&v, &rhs[k..]);
        vec::axpy(-s, &v, &mut rhs[k..]);
    }

    // Back substitution on the upper-triangular factor.
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut s = rhs[k];
        for j in k + 1..n {
            s -= q[j * m + k] * x[j];
        }
        let rkk = q[k * m + k];
        if rkk == 0.0 {
            return Err(LinalgError::NotSpd);
        }
        x[k] = s / rkk;
    }
    check_finite(&x)?;
    Ok(x)
}

/// Solve (J^T J + mu I) d = -J^T F as the least-squares minimizer of
/// ||[J; sqrt(mu) I] d + [F; 0]||.
pub fn solve_lm_system(
    j: &DenseMatrix,
    residual: &[f64],
    mu: f64,
) -> Result<Vec<f64>, LinalgError> {
    assert!(mu > 0.0, "regularization parameter must be positive");
    let (m, n) = (j.rows(), j.cols());
    assert_eq!(residual.len(), m);
    if !j.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    check_finite(residual)?;

    let sq = mu.sqrt();
    let mut aug = DenseMatrix::zeros(m + n, n);
    for i in 0..m {
        for k in 0..n {
            aug.set(i, k, j.get(i, k));
        }
    }
    for k in 0..n {
        aug.set(m + k, k, sq);
    }
    let mut rhs = vec![0.0; m + n];
    for (ri, fi) in rhs.iter_mut().zip(residual) {
        *ri = -fi;
    }
    householder_lstsq(&aug, &rhs)
}

/// Sparse-Jacobian variant of [`solve_lm_system`] via the dual system:
/// with mu > 0, (J^T J + mu I)^-1 J^T = J^T (J J^T + mu I)^-1, so
/// d = -J^T y where (J J^T + mu I) y = F. The Gram matrix is rows x rows,
/// which is small for the wide systems this path serves.
pub fn solve_lm_system_sparse(
    j: &SparseRowMat,
    residual: &[f64],
    mu: f64,
) -> Result<Vec<f64>, LinalgError> {
    assert!(mu > 0.0, "regularization parameter must be positive");
    assert_eq!(residual.len(), j.rows());
    if !j.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    check_finite(residual)?;

    let mut g = j.gram();
    for i in 0..g.dim() {
        let v = g.get(i, i) + mu;
        g.set_sym(i, i, v);
    }
    let y = cholesky_solve(&g, residual)?;
    let mut d = j.t_matvec(&y);
    vec::scale(-1.0, &mut d);
    check_finite(&d)?;
    Ok(d)
}

/// Solve the SPD system G x = b by Cholesky factorization.
pub fn cholesky_solve(g: &SymMatrix, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = g.dim();
    assert_eq!(b.len(), n);
    if !g.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    check_finite(b)?;

    // Lower factor, row-major.
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = g.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(LinalgError::NotSpd);
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }

    let mut x = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            x[i] = x[i] - l[i * n + k] * x[k];
        }
        x[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            x[i] = x[i] - l[k * n + i] * x[k];
        }
        x[i] /= l[i * n + i];
    }
    Ok(x)
}
