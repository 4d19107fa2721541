use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lisdist_bench::Y_VALUES;
use lisdist_core::exact_series::{moment_series, DEFAULT_ORDER};
use lisdist_core::moments::{moments_exact, truncation_window, DEFAULT_EPS};
use lisdist_core::oracle::mc_sample;
use lisdist_core::painleve2::{solve_hastings_mcleod, DEFAULT_REL_TOL, DEFAULT_S_MAX, DEFAULT_S_MIN};
use lisdist_core::{dpii, toeplitz_cdf};

fn determinant(c: &mut Criterion) {
    let mut group = c.benchmark_group("determinant");
    group.sample_size(10);
    for &y in Y_VALUES {
        let r_max = truncation_window(y);
        group.bench_with_input(BenchmarkId::from_parameter(y), &y, |b, &y| {
            b.iter(|| toeplitz_cdf::log_phi_sequence(black_box(y), r_max).unwrap())
        });
    }
    group.finish();
}

fn recursion(c: &mut Criterion) {
    let mut group = c.benchmark_group("recursion");
    for &y in &[1.0, 9.0, 25.0] {
        group.bench_with_input(BenchmarkId::from_parameter(y), &y, |b, &y| {
            b.iter(|| dpii::log_phi_sequence(black_box(y), 10, dpii::MIN_QUAD_NODES).unwrap())
        });
    }
    group.finish();
}

fn series(c: &mut Criterion) {
    let mut group = c.benchmark_group("series");
    group.sample_size(10);
    group.bench_function("moment_series_20", |b| b.iter(|| moment_series(black_box(DEFAULT_ORDER)).unwrap()));
    group.finish();
}

fn painleve(c: &mut Criterion) {
    let mut group = c.benchmark_group("painleve");
    group.sample_size(10);
    group.bench_function("hastings_mcleod", |b| {
        b.iter(|| solve_hastings_mcleod(DEFAULT_S_MIN, DEFAULT_S_MAX, black_box(DEFAULT_REL_TOL)).unwrap())
    });
    group.finish();
}

fn moments(c: &mut Criterion) {
    let mut group = c.benchmark_group("moments_exact");
    group.sample_size(10);
    for &y in Y_VALUES {
        group.bench_with_input(BenchmarkId::from_parameter(y), &y, |b, &y| {
            b.iter(|| moments_exact(black_box(y), DEFAULT_EPS).unwrap())
        });
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    for &y in &[4.0, 100.0] {
        group.bench_with_input(BenchmarkId::from_parameter(y), &y, |b, &y| {
            b.iter(|| mc_sample(black_box(y), 20_000, 1).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, determinant, recursion, series, painleve, moments, monte_carlo);
criterion_main!(benches);
