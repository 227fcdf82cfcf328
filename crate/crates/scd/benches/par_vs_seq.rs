//! Parallel vs sequential comparison of the hot kernels.
//!
//! Each group benches the same operation inside a 1-worker pool and a
//! max-worker pool. Building with `--no-default-features` measures the true
//! sequential fallback (the pool sizes then have no effect), so the two
//! builds can be compared through criterion's saved baselines.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scd::embedding::EmbeddingParams;
use scd::kmeans::{minibatch_kmeans, KMeansOptions};
use scd::lfr::{generate_lfr, LfrParams};
use scd::netmf::{netmf_target, NetmfOptions};
use scd::par;
use scd::ppr::{ppr_embed, PprParams};
use scd::silhouette::silhouette_global;
use scd::RowMatrix;

fn pool_sizes() -> Vec<(&'static str, usize)> {
    vec![("threads/1", 1), ("threads/max", 0)]
}

fn bench_graph() -> scd::Graph {
    let params = LfrParams::new(600, 12.0, 40, 0.1, 7);
    generate_lfr(&params).expect("benchmark graph").0
}

fn random_rows(n: usize, d: usize, seed: u64) -> RowMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = RowMatrix::zeros(n, d);
    for i in 0..n {
        for j in 0..d {
            m.set(i, j, rng.random::<f64>());
        }
    }
    m
}

fn bench_netmf_target(c: &mut Criterion) {
    let g = bench_graph();
    let opts = NetmfOptions::new(5, 1);
    let mut group = c.benchmark_group("netmf_target");
    for (label, threads) in pool_sizes() {
        group.bench_with_input(BenchmarkId::from_parameter(label), &threads, |b, &t| {
            b.iter(|| par::with_threads(t, || netmf_target(&g, &opts).unwrap()));
        });
    }
    group.finish();
}

fn bench_ppr_embed(c: &mut Criterion) {
    let g = bench_graph();
    let params = PprParams::default();
    let mut group = c.benchmark_group("ppr_embed");
    group.sample_size(10);
    for (label, threads) in pool_sizes() {
        group.bench_with_input(BenchmarkId::from_parameter(label), &threads, |b, &t| {
            b.iter(|| par::with_threads(t, || ppr_embed(&g, &params, 0).unwrap()));
        });
    }
    group.finish();
}

fn bench_embed_full(c: &mut Criterion) {
    let g = bench_graph();
    let params = EmbeddingParams::netmf(5, 1, 32, 0);
    let mut group = c.benchmark_group("netmf_embed");
    group.sample_size(10);
    for (label, threads) in pool_sizes() {
        group.bench_with_input(BenchmarkId::from_parameter(label), &threads, |b, &t| {
            b.iter(|| par::with_threads(t, || scd::netmf::netmf_embed(&g, &params).unwrap()));
        });
    }
    group.finish();
}

fn bench_kmeans(c: &mut Criterion) {
    let x = random_rows(2000, 32, 3);
    let opts = KMeansOptions::default();
    let mut group = c.benchmark_group("minibatch_kmeans");
    for (label, threads) in pool_sizes() {
        group.bench_with_input(BenchmarkId::from_parameter(label), &threads, |b, &t| {
            b.iter(|| par::with_threads(t, || minibatch_kmeans(&x, 20, &opts, 1).unwrap()));
        });
    }
    group.finish();
}

fn bench_silhouette(c: &mut Criterion) {
    let x = random_rows(1500, 32, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let labels: Vec<usize> = (0..1500).map(|_| rng.random_range(0..20)).collect();
    let mut group = c.benchmark_group("silhouette_global");
    for (label, threads) in pool_sizes() {
        group.bench_with_input(BenchmarkId::from_parameter(label), &threads, |b, &t| {
            b.iter(|| par::with_threads(t, || silhouette_global(&x, &labels).unwrap()));
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_netmf_target,
    bench_ppr_embed,
    bench_embed_full,
    bench_kmeans,
    bench_silhouette
);
criterion_main!(benches);
