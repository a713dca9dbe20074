use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use delayed_choice::experiment::phi_grid;
use delayed_choice::hv::{grid_search_with, Setting, DEFAULT_CELL_TOL};
use delayed_choice::sampler::{sample_clicks_with, sampled_sweep_with};
use delayed_choice::{ControlMode, Execution, ExperimentConfig};

const STRATEGIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn clicks(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_clicks");
    group.sample_size(10);
    for mode in [ControlMode::QuantumControl, ControlMode::ClassicalControl] {
        let cfg = ExperimentConfig::new(0.7, 1.1, mode, 1_000_000, 3).unwrap();
        for (name, exec) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, format!("{mode:?}")), &cfg, |b, cfg| {
                b.iter(|| sample_clicks_with(black_box(cfg), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sampled_sweep");
    group.sample_size(10);
    let grid = phi_grid(256);
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |b| b.iter(|| sampled_sweep_with(0.7, black_box(&grid), 10_000, 3, exec).unwrap()));
    }
    group.finish();
}

fn search(c: &mut Criterion) {
    let mut group = c.benchmark_group("grid_search");
    group.sample_size(10);
    let setting = Setting::new(0.3, 0.7).unwrap();
    for resolution in [0.05, 0.02] {
        for (name, exec) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, resolution), &resolution, |b, &r| {
                b.iter(|| grid_search_with(black_box(&setting), r, DEFAULT_CELL_TOL, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, clicks, sweep, search);
criterion_main!(benches);
