use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use nnpc::distances::distance_matrix;
use nnpc::experiment::{run_bench, BenchConfig};
use nnpc::generators::{make_benchmark_dataset, overlapping_arma_models, NoiseSpec};
use nnpc::numerics::RngStream;
use nnpc::spectra::{estimate_psds, PsdConfig};
use nnpc::Execution;

const POLICIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn psd_and_distances(c: &mut Criterion) {
    let models = overlapping_arma_models();
    let config = PsdConfig::default();
    let mut group = c.benchmark_group("psd_and_distances");
    group.sample_size(10);
    for len in [1024, 4096] {
        let data =
            make_benchmark_dataset(&models, &[25, 25, 25], len, NoiseSpec::default(), &RngStream::new(1, 0)).unwrap();
        let psds = estimate_psds(&data.observations, &config, Execution::Sequential).unwrap();
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(format!("estimate_psds/{name}"), len), &len, |b, _| {
                b.iter(|| estimate_psds(black_box(&data.observations), &config, exec).unwrap())
            });
            group.bench_with_input(BenchmarkId::new(format!("distance_matrix/{name}"), len), &len, |b, _| {
                b.iter(|| distance_matrix(black_box(&psds), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_trials(c: &mut Criterion) {
    let mut config = BenchConfig::new(overlapping_arma_models(), vec![512], vec![0.0], 4, 7);
    config.n_per_model = 10;
    let mut group = c.benchmark_group("run_bench");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        group.bench_function(name, |b| b.iter(|| run_bench(black_box(&config), exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, psd_and_distances, bench_trials);
criterion_main!(benches);
