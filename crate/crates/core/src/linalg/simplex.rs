//! Euclidean projection onto the unit simplex.

use super::{check_finite, LinalgError};

/// Project `y` onto the unit simplex { w : w_i >= 0, sum w_i = 1 } by the
/// sort-and-threshold rule: with u the entries of y sorted descending and
/// rho the largest index with u_rho - (sum_{i<=rho} u_i - 1)/rho > 0, the
/// projection is w_i = max(y_i - tau, 0) with tau = (sum_{i<=rho} u_i - 1)/rho.
pub fn project_simplex(y: &[f64]) -> Result<Vec<f64>, LinalgError> {
    check_finite(y)?;
    assert!(!y.is_empty(), "cannot project the empty vector");

    let mut u = y.to_vec();
    u.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite entries"));

    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cumsum += uk;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if uk - t > 0.0 {
            tau = t;
        }
    }

    Ok(y.iter().map(|&yi| (yi - tau).max(0.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vec;

    /// Brute-force oracle: enumerate every nonempty support S, form the
    /// candidate w with w_i = y_i - (sum_S y - 1)/|S| on S and 0 elsewhere,
    /// keep the feasible candidate closest to y.
    pub(crate) fn simplex_oracle(y: &[f64]) -> Vec<f64> {
        let n = y.len();
        assert!(n <= 20, "oracle enumerates 2^n supports");
        let mut best: Option<(f64, Vec<f64>)> = None;
        for mask in 1u32..(1 << n) {
            let support: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let s: f64 = support.iter().map(|&i| y[i]).sum();
            let t = (s - 1.0) / support.len() as f64;
            let mut w = vec![0.0; n];
            for &i in &support {
                w[i] = y[i] - t;
            }
            if w.iter().any(|&wi| wi < 0.0) {
                continue;
            }
            let d = vec::dist(&w, y);
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, w));
            }
        }
        best.expect("some support is feasible").1
    }

    #[test]
    fn symmetric_point() {
        let w = project_simplex(&[0.5, 0.5, 0.5]).unwrap();
        for wi in w {
            assert!((wi - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn dominant_coordinate() {
        let w = project_simplex(&[2.0, 0.0, 0.0]).unwrap();
        assert_eq!(w, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn frozen_example() {
        // Oracle value for (0.4, 0.3, 0.1): support {1,2,3}, tau = -0.0666...
        let w = project_simplex(&[0.4, 0.3, 0.1]).unwrap();
        assert!((w[0] - 0.4667).abs() < 1e-4);
        assert!((w[1] - 0.3667).abs() < 1e-4);
        assert!((w[2] - 0.1667).abs() < 1e-4);
        let o = simplex_oracle(&[0.4, 0.3, 0.1]);
        assert!(vec::dist(&w, &o) < 1e-12);
    }

    #[test]
    fn rejects_non_finite() {
        assert_eq!(
            project_simplex(&[f64::NAN, 0.0]),
            Err(LinalgError::NonFinite)
        );
    }

    #[test]
    fn matches_oracle_on_seeded_sample() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..1000 {
            let n = rng.random_range(1..=4);
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let w = project_simplex(&y).unwrap();
            let o = simplex_oracle(&y);
            assert!(
                vec::dist(&w, &o) <= 1e-10,
                "mismatch for {y:?}: {w:?} vs {o:?}"
            );
            let sum: f64 = w.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12);
            assert!(w.iter().all(|&wi| wi >= 0.0));
        }
    }

    proptest::proptest! {
        #[test]
        fn output_is_feasible_and_idempotent(
            y in proptest::collection::vec(-5.0f64..5.0, 1..12)
        ) {
            let w = project_simplex(&y).unwrap();
            let sum: f64 = w.iter().sum();
            proptest::prop_assert!((sum - 1.0).abs() < 1e-12);
            proptest::prop_assert!(w.iter().all(|&wi| wi >= 0.0));
            let w2 = project_simplex(&w).unwrap();
            proptest::prop_assert!(vec::dist(&w, &w2) < 1e-12);
        }
    }
}
