//! Partial symmetric eigendecomposition: the k algebraically largest
//! eigenpairs via thick-restart Lanczos with full reorthogonalization.
//!
//! The matvec budget is 10 * k * sqrt(n); if it is exhausted before the
//! requested pairs converge the routine falls back to the full
//! decomposition, so callers always receive certified pairs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{sym_eig_full, vec, EigPair, LinalgError, SymMatrix};

/// Fixed seed for the deterministic Lanczos start vector.
const LANCZOS_SEED: u64 = 0x4C41_4E43;

/// Below this dimension the full decomposition is cheaper than restarting.
const SMALL_DIM: usize = 32;

/// The k algebraically largest eigenpairs of a symmetric matrix, descending.
pub fn sym_eig_topk(m: &SymMatrix, k: usize) -> Result<Vec<EigPair>, LinalgError> {
    let n = m.dim();
    assert!(k >= 1 && k <= n, "need 1 <= k <= n");
    if !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    if n <= SMALL_DIM || 4 * k >= n {
        let mut pairs = sym_eig_full(m)?;
        pairs.truncate(k);
        return Ok(pairs);
    }
    match lanczos_topk(m, k) {
        Ok(pairs) => Ok(pairs),
        Err(LinalgError::NoConverge) => {
            let mut pairs = sym_eig_full(m)?;
            pairs.truncate(k);
            Ok(pairs)
        }
        Err(e) => Err(e),
    }
}

/// Thick-restart Lanczos. Errors with `NoConverge` when the matvec budget
/// runs out.
pub(crate) fn lanczos_topk(m: &SymMatrix, k: usize) -> Result<Vec<EigPair>, LinalgError> {
    let n = m.dim();
    let scale = 1.0 + m.frobenius_norm();
    let res_tol = 1e-10 * scale;
    let budget = (10.0 * k as f64 * (n as f64).sqrt()).ceil() as usize;
    let mdim = (2 * k + 16).clamp(k + 2, n);
    let keep = (k + 8).min(mdim.saturating_sub(2)).max(k);

    let mut rng = ChaCha8Rng::seed_from_u64(LANCZOS_SEED);
    let mut matvecs = 0usize;

    // Orthonormal basis with fully processed T columns, plus the candidate
    // vector continuing the recurrence. T = V^T A V is accumulated from the
    // reorthogonalization coefficients, so the projected block stays exact
    // across deflations and thick restarts; T[j+1][j] is recorded when the
    // candidate joins the basis.
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(mdim + 1);
    let mut t = SymMatrix::zeros(mdim + 1);
    let mut next: Option<Vec<f64>> = Some(random_unit(&mut rng, n));

    loop {
        while basis.len() < mdim {
            let Some(v) = next.take() else { break };
            basis.push(v);
            let j = basis.len() - 1;
            if matvecs >= budget {
                return Err(LinalgError::NoConverge);
            }
            let mut w = m.matvec(&basis[j]);
            matvecs += 1;
            // Two full reorthogonalization passes. The summed coefficients
            // are the entries of column j of V^T A V; they overwrite the
            // beta recorded by the previous step (same value, measured).
            let mut coef = vec![0.0; j + 1];
            for _pass in 0..2 {
                for (i, vi) in basis.iter().enumerate() {
                    let c = vec::dot(&w, vi);
                    vec::axpy(-c, vi, &mut w);
                    coef[i] += c;
                }
            }
            for (i, c) in coef.iter().enumerate() {
                t.set_sym(i, j, *c);
            }
            let beta = vec::norm2(&w);
            if beta > 1e-13 * scale {
                t.set_sym(j + 1, j, beta);
                vec::scale(1.0 / beta, &mut w);
                next = Some(w);
            } else {
                // Invariant subspace; continue from a fresh direction with
                // zero coupling.
                next = fresh_direction(&mut rng, n, &basis);
            }
        }

        // Rayleigh-Ritz over the processed block.
        let cur = basis.len();
        let mut tsub = SymMatrix::zeros(cur);
        for i in 0..cur {
            for j in i..cur {
                tsub.set_sym(i, j, t.get(i, j));
            }
        }
        let ritz = sym_eig_full(&tsub)?;
        // Zero when the last extension deflated or the space is exhausted.
        let beta_last = if cur < n { t.get(cur, cur - 1) } else { 0.0 };
        let takeable = k.min(cur);
        // Cheap residual estimates |beta_last * s[last]| steer the restart.
        let estimates_ok = ritz
            .iter()
            .take(takeable)
            .all(|rp| (beta_last * rp.vector[cur - 1]).abs() <= res_tol);

        if (estimates_ok && takeable == k) || cur >= n {
            // Assemble and verify directly before accepting.
            let mut pairs = Vec::with_capacity(takeable);
            let mut verified = true;
            for rp in ritz.iter().take(takeable) {
                let mut y = vec![0.0; n];
                for (i, vi) in basis.iter().enumerate() {
                    vec::axpy(rp.vector[i], vi, &mut y);
                }
                let ny = vec::norm2(&y);
                vec::scale(1.0 / ny, &mut y);
                if matvecs >= budget {
                    return Err(LinalgError::NoConverge);
                }
                let ay = m.matvec(&y);
                matvecs += 1;
                let res = vec::norm2(&vec::add_scaled(&ay, -rp.value, &y));
                if res > 10.0 * res_tol {
                    verified = false;
                }
                pairs.push(EigPair {
                    value: rp.value,
                    vector: y,
                });
            }
            if (verified && pairs.len() == k) || cur >= n {
                for p in pairs.iter_mut() {
                    fix_sign(&mut p.vector);
                }
                return Ok(pairs);
            }
        }

        let Some(cont) = next.take() else {
            return Err(LinalgError::NoConverge);
        };

        // Thick restart: keep the leading Ritz vectors, continue from the
        // carried direction (already orthogonal to their span).
        let keep_now = keep.min(cur.saturating_sub(1)).max(takeable);
        let mut new_basis: Vec<Vec<f64>> = Vec::with_capacity(mdim + 1);
        let mut new_t = SymMatrix::zeros(mdim + 1);
        for (idx, rp) in ritz.iter().take(keep_now).enumerate() {
            let mut y = vec![0.0; n];
            for (i, vi) in basis.iter().enumerate() {
                vec::axpy(rp.vector[i], vi, &mut y);
            }
            let ny = vec::norm2(&y);
            vec::scale(1.0 / ny, &mut y);
            new_t.set_sym(idx, idx, rp.value);
            new_basis.push(y);
        }
        let mut cont = cont;
        for vi in new_basis.iter() {
            let c = vec::dot(&cont, vi);
            vec::axpy(-c, vi, &mut cont);
        }
        let nv = vec::norm2(&cont);
        basis = new_basis;
        t = new_t;
        if nv > 1e-12 {
            vec::scale(1.0 / nv, &mut cont);
            next = Some(cont);
        } else {
            next = fresh_direction(&mut rng, n, &basis);
        }
    }
}

/// Deterministic pseudorandom unit vector orthogonal to the given basis,
/// or `None` when the basis already spans the space.
fn fresh_direction(rng: &mut ChaCha8Rng, n: usize, basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    for _attempt in 0..4 {
        let mut v = random_unit(rng, n);
        for _pass in 0..2 {
            for vi in basis {
                let c = vec::dot(&v, vi);
                vec::axpy(-c, vi, &mut v);
            }
        }
        let nv = vec::norm2(&v);
        if nv > 1e-8 {
            vec::scale(1.0 / nv, &mut v);
            return Some(v);
        }
    }
    None
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nv = vec::norm2(&v);
    vec::scale(1.0 / nv, &mut v);
    v
}

fn fix_sign(v: &mut [f64]) {
    let mut imax = 0;
    for (i, vi) in v.iter().enumerate() {
        if vi.abs() > v[imax].abs() {
            imax = i;
        }
    }
    if v[imax] < 0.0 {
        for vi in v.iter_mut() {
            *vi = -*vi;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_sym(n: usize, seed: u64) -> SymMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        SymMatrix::from_full(n, &data)
    }

    #[test]
    fn diagonal_top2() {
        let mut m = SymMatrix::zeros(3);
        for (i, v) in [3.0, 2.0, 1.0].iter().enumerate() {
            m.set_sym(i, i, *v);
        }
        let pairs = sym_eig_topk(&m, 2).unwrap();
        assert!((pairs[0].value - 3.0).abs() < 1e-12);
        assert!((pairs[1].value - 2.0).abs() < 1e-12);
        assert!((pairs[0].vector[0] - 1.0).abs() < 1e-10);
        assert!((pairs[1].vector[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rank_one_top1() {
        let n = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let nv = vec::norm2(&v);
        vec::scale(1.0 / nv, &mut v);
        let m = SymMatrix::from_weighted_outer(n, &[1.0], &[v.clone()]);
        let pairs = sym_eig_topk(&m, 1).unwrap();
        assert!((pairs[0].value - 1.0).abs() < 1e-10);
        let overlap = vec::dot(&pairs[0].vector, &v).abs();
        assert!((overlap - 1.0).abs() < 1e-10);
    }

    #[test]
    fn seeded_8x8_matches_full_top3() {
        let m = random_sym(8, 77);
        let full = sym_eig_full(&m).unwrap();
        let top = sym_eig_topk(&m, 3).unwrap();
        for (f, t) in full.iter().zip(&top) {
            assert!((f.value - t.value).abs() <= 1e-8 * (1.0 + m.frobenius_norm()));
        }
    }

    #[test]
    fn lanczos_path_matches_full_on_larger_matrix() {
        for seed in [1u64, 2, 3] {
            let n = 120;
            let m = random_sym(n, seed);
            let full = sym_eig_full(&m).unwrap();
            let top = lanczos_topk(&m, 4).expect("within budget");
            for (f, t) in full.iter().take(4).zip(&top) {
                assert!(
                    (f.value - t.value).abs() <= 1e-8 * (1.0 + m.frobenius_norm()),
                    "seed {seed}: {} vs {}",
                    f.value,
                    t.value
                );
                let r = vec::norm2(&vec::add_scaled(&m.matvec(&t.vector), -t.value, &t.vector));
                assert!(r <= 1e-8 * (1.0 + m.frobenius_norm()));
            }
        }
    }

    #[test]
    fn topk_n_equals_full_up_to_sign() {
        let n = 10;
        let m = random_sym(n, 9);
        let full = sym_eig_full(&m).unwrap();
        let top = sym_eig_topk(&m, n).unwrap();
        for (f, t) in full.iter().zip(&top) {
            assert!((f.value - t.value).abs() <= 1e-8 * (1.0 + m.frobenius_norm()));
            let overlap = vec::dot(&f.vector, &t.vector).abs();
            assert!((overlap - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn repeated_eigenvalues_deflate() {
        // Rank-2 matrix with a double eigenvalue and n much larger.
        let n = 50;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut v1: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        vec::scale(1.0 / vec::norm2(&v1), &mut v1);
        let mut v2: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let c = vec::dot(&v2, &v1);
        vec::axpy(-c, &v1, &mut v2);
        vec::scale(1.0 / vec::norm2(&v2), &mut v2);
        let m = SymMatrix::from_weighted_outer(n, &[2.0, 2.0], &[v1, v2]);
        let pairs = lanczos_topk(&m, 3).expect("within budget");
        assert!((pairs[0].value - 2.0).abs() < 1e-8);
        assert!((pairs[1].value - 2.0).abs() < 1e-8);
        assert!(pairs[2].value.abs() < 1e-8);
    }
}
