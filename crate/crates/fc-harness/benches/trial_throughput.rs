//! Parallel trial execution against the sequential fallback, on the real
//! Monte-Carlo workloads (maxima counts and discrepancy queries).

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use fc_core::{mix_seed, Key, PointSet, VertexId};
use fc_harness::dist::Distribution;
use fc_harness::experiments::{build_path_graph, uniform_points};
use fc_harness::runner::{map_trials, map_trials_seq};

fn maxima_trial(seed: u64, n: usize, t: usize) -> usize {
    let pts = uniform_points(n, mix_seed(seed, t as u64));
    PointSet::from_points(mix_seed(seed, 1000 + t as u64), pts)
        .unwrap()
        .maxima_count()
}

fn bench_maxima_trials(c: &mut Criterion) {
    let trials = 16;
    let n = 4096;
    let mut group = c.benchmark_group("maxima_trials");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(map_trials(trials, |t| maxima_trial(7, n, t))))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(map_trials_seq(trials, |t| maxima_trial(7, n, t))))
    });
    group.finish();
}

fn bench_discrepancy_queries(c: &mut Criterion) {
    let k = 32;
    let n = 4096;
    let graph = build_path_graph(&Distribution::UniformSquare, k, n, 11).unwrap();
    let path: Vec<VertexId> = (0..k as u64).map(VertexId).collect();
    let queries: Vec<f64> = {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        (0..512).map(|_| rng.random()).collect()
    };
    let run_one = |i: usize| {
        let x = Key::finite(queries[i]).unwrap();
        let (_, trace) = graph.path_search(&path, x).unwrap();
        trace.total_log2_delta()
    };
    let mut group = c.benchmark_group("discrepancy_queries");
    group.sample_size(20);
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(map_trials(queries.len(), run_one)))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(map_trials_seq(queries.len(), run_one)))
    });
    group.finish();
}

criterion_group!(benches, bench_maxima_trials, bench_discrepancy_queries);
criterion_main!(benches);
