//! Sequential vs rayon execution of the same indexed workloads.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use horolab::counting::{count_s_with, DEFAULT_CAP};
use horolab::exec::Exec;
use horolab::geometry::FNPoint;
use horolab::measures::{fd_importance_draws, ModuliSurface, SamplerConfig};
use horolab::topology::MultiCurveConfig;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn counting(c: &mut Criterion) {
    let x = FNPoint::modular();
    let config = MultiCurveConfig::torus_curve();
    let mut g = c.benchmark_group("count_s_L100");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| count_s_with(black_box(&x), &config, &[1.0], 100.0, DEFAULT_CAP, exec).unwrap())
        });
    }
    g.finish();
}

fn sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("fd_draws_20k");
    g.sample_size(20);
    for (name, exec) in MODES {
        let cfg = SamplerConfig::new(1, 20_000).with_exec(exec);
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| fd_importance_draws(black_box(ModuliSurface::Torus), &cfg).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, counting, sampling);
criterion_main!(benches);
