use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use refresh_bench::{calibration_options, calibration_sources, scenario};
use refresh_core::composer::compose;
use refresh_core::ingest::bundled;
use refresh_core::lifecycle::{
    breakeven_time, crossover_scan, evaluate, indifference_time, sweep, OptionSource, ScanConfig, SweepParameter,
};
use std::hint::black_box;

fn closed_forms(c: &mut Criterion) {
    let (o0, o1) = calibration_options();
    let s = scenario(0.9);
    c.bench_function("indifference_time", |b| {
        b.iter(|| indifference_time(black_box(&o0), black_box(&o1), black_box(&s)))
    });
    c.bench_function("breakeven_time", |b| {
        b.iter(|| breakeven_time(black_box(&o0), black_box(&o1), black_box(&s)))
    });
    c.bench_function("evaluate", |b| {
        b.iter(|| evaluate(black_box(&o0), black_box(&o1), black_box(&s)))
    });
}

fn scan(c: &mut Criterion) {
    let (o0, o1) = calibration_options();
    let s = scenario(0.9);
    let mut group = c.benchmark_group("crossover_scan");
    for dt in [1e-2, 1e-3, 1e-4] {
        let cfg = ScanConfig::new(24.0, dt);
        group.bench_with_input(BenchmarkId::from_parameter(dt), &cfg, |b, cfg| {
            b.iter(|| crossover_scan(&o0, &o1, &s, black_box(cfg)))
        });
    }
    group.finish();
}

fn sweeps(c: &mut Criterion) {
    let catalog = bundled::catalog();
    let (a, b) = calibration_sources(&catalog);
    let s = scenario(0.0);
    let mut group = c.benchmark_group("sweep_renewables");
    for n in [20usize, 1000] {
        let values: Vec<f64> = (0..n).map(|i| 0.95 * i as f64 / (n - 1) as f64).collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &values, |bench, values| {
            bench.iter(|| sweep(&a, &b, &s, SweepParameter::RenewableFraction, black_box(values)))
        });
    }
    group.finish();
}

fn composition(c: &mut Criterion) {
    let catalog = bundled::catalog();
    let OptionSource::Composed(mixed) = catalog.option_source("refresh_2x_vc709_2x_zcu102").expect("bundled id") else {
        unreachable!("bundled id names a composition")
    };
    c.bench_function("compose_heterogeneous", |b| b.iter(|| compose(black_box(&mixed))));
}

criterion_group!(benches, closed_forms, scan, sweeps, composition);
criterion_main!(benches);
