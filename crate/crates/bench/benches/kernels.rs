//! Benchmarks of the hot numerical kernels: rearrangement-based norms,
//! direct vs FFT convolution, and solver stepping.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use driftlab_bench::gaussian_field;
use driftlab_core::drift::DriftSpec;
use driftlab_core::grid::{Field, Grid};
use driftlab_core::heat::{convolve, convolve_fft};
use driftlab_core::lorentz::{lorentz_norm, rearrange, Convention, LorentzIndex};
use driftlab_core::solver::{self, RunConfig, SolverState};
use std::hint::black_box;

fn bench_lorentz(c: &mut Criterion) {
    let mut group = c.benchmark_group("lorentz");
    for n in [1 << 10, 1 << 14] {
        let f = gaussian_field(8.0, n, 0.25);
        group.bench_with_input(BenchmarkId::new("rearrange", n), &f, |b, f| {
            b.iter(|| rearrange(black_box(f)).unwrap())
        });
        let weak = LorentzIndex::weak(2.5).unwrap();
        let p1 = LorentzIndex::new(2.5, 1.0).unwrap();
        group.bench_with_input(BenchmarkId::new("weak_norm", n), &f, |b, f| {
            b.iter(|| lorentz_norm(black_box(f), weak, Convention::DoubleStar).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("p1_norm", n), &f, |b, f| {
            b.iter(|| lorentz_norm(black_box(f), p1, Convention::DoubleStar).unwrap())
        });
    }
    group.finish();
}

fn bench_convolution(c: &mut Criterion) {
    let mut group = c.benchmark_group("convolution");
    for n in [257usize, 1025, 4097] {
        let f = gaussian_field(10.0, n, 0.3);
        let g = gaussian_field(10.0, n, 0.7);
        if n <= 1025 {
            group.bench_with_input(BenchmarkId::new("direct", n), &n, |b, _| {
                b.iter(|| convolve(black_box(&f), black_box(&g)).unwrap())
            });
        }
        group.bench_with_input(BenchmarkId::new("fft", n), &n, |b, _| {
            b.iter(|| convolve_fft(black_box(&f), black_box(&g)).unwrap())
        });
    }
    group.finish();
}

fn bench_solver_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("solver");
    for n in [1024usize, 8192] {
        let grid = Grid::new(30.0, n).unwrap();
        let u0 = Field::from_fn(grid, |x| (-x * x / 2.0).exp());
        let drift = DriftSpec::saturating(1.0);
        let cfg = RunConfig::new(1.0, drift, u0, 1.0).unwrap();
        group.bench_with_input(BenchmarkId::new("imex_step", n), &cfg, |b, cfg| {
            b.iter_batched(
                || SolverState { t: 0.0, u: cfg.u0.clone(), dt: 0.0, step_count: 0 },
                |mut state| solver::step(&mut state, cfg, 1e-4).unwrap(),
                criterion::BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, bench_lorentz, bench_convolution, bench_solver_step);
criterion_main!(benches);
