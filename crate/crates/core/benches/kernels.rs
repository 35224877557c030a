//! Criterion suite for the hot kernels: full and partial eigensolves, the
//! regularized least-squares solve, the simplex projection, and the two
//! spectrahedron projection routes (exact vs rank-p).
//!
//! Build twice to compare the rayon path against the sequential fallback:
//!
//!   cargo bench -p lmproj-core -- --save-baseline par
//!   cargo bench -p lmproj-core --no-default-features -- --baseline par

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use lmproj_core::linalg::{
    project_simplex, solve_lm_system, sym_eig_full, sym_eig_topk, DenseMatrix, SymMatrix,
};
use lmproj_core::sets::{fw_rank_p_project, RankState, SpectrahedronSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_sym(n: usize, seed: u64) -> SymMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    SymMatrix::from_full(n, &data)
}

/// Low-rank-plus-noise matrix shaped like the solver's projection inputs.
fn spiked_sym(n: usize, q: usize, seed: u64) -> SymMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vs = Vec::with_capacity(q);
    for _ in 0..q {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= nv);
        vs.push(v);
    }
    let weights = vec![1.0 / q as f64; q];
    let mut m = SymMatrix::from_weighted_outer(n, &weights, &vs);
    for i in 0..n {
        for j in i..n {
            let noise = 1e-3 * rng.random_range(-1.0..1.0);
            m.set_sym(i, j, m.get(i, j) + noise);
        }
    }
    m
}

fn bench_eig(c: &mut Criterion) {
    let mut g = c.benchmark_group("eig_full");
    g.sample_size(10);
    for n in [96usize, 256, 512] {
        let m = random_sym(n, 7);
        g.bench_function(format!("n{n}"), |b| {
            b.iter(|| sym_eig_full(black_box(&m)).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("eig_topk");
    g.sample_size(10);
    for (n, k) in [(512usize, 4usize), (1024, 4)] {
        let m = spiked_sym(n, 4, 11);
        g.bench_function(format!("n{n}_k{k}"), |b| {
            b.iter(|| sym_eig_topk(black_box(&m), k).unwrap())
        });
    }
    g.finish();
}

fn bench_matvec(c: &mut Criterion) {
    let mut g = c.benchmark_group("sym_matvec");
    for n in [512usize, 2048] {
        let m = random_sym(n, 3);
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        g.bench_function(format!("n{n}"), |b| {
            b.iter(|| black_box(&m).matvec(black_box(&x)))
        });
    }
    g.finish();
}

fn bench_lm_solve(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (m, n) = (60usize, 120usize);
    let j = DenseMatrix::from_rows(
        m,
        n,
        (0..m * n).map(|_| rng.random_range(-1.0..1.0)).collect(),
    );
    let f: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
    c.bench_function("lm_solve_aug_qr_60x120", |b| {
        b.iter(|| solve_lm_system(black_box(&j), black_box(&f), 0.3).unwrap())
    });
}

fn bench_simplex(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let y: Vec<f64> = (0..100_000).map(|_| rng.random_range(-1.0..1.0)).collect();
    c.bench_function("project_simplex_1e5", |b| {
        b.iter_batched(
            || y.clone(),
            |y| project_simplex(black_box(&y)).unwrap(),
            BatchSize::LargeInput,
        )
    });
}

fn bench_spectra_projections(c: &mut Criterion) {
    let mut g = c.benchmark_group("spectra_project");
    g.sample_size(10);
    let n = 512;
    let set = SpectrahedronSet::new(n);
    let y = set.svec(&spiked_sym(n, 4, 13));
    g.bench_function("exact_n512", |b| {
        b.iter(|| set.exact_project(black_box(&y)).unwrap())
    });
    g.bench_function("fwp_n512_eps1e-2", |b| {
        b.iter(|| fw_rank_p_project(&set, black_box(&y), 1e-2, RankState::new(1)).unwrap())
    });
    g.finish();
}

criterion_group!(
    benches,
    bench_eig,
    bench_matvec,
    bench_lm_solve,
    bench_simplex,
    bench_spectra_projections
);
criterion_main!(benches);
