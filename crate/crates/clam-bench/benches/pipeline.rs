use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use clam_bench::setup;
use clam_core::estimator::{assemble, solve_full};
use clam_core::fieldsim::simulate;
use clam_core::kernel::{build_kernel, build_windowed};
use clam_core::windows::{BaseWindow, WindowKind, WindowSet};

fn bench_pipeline(c: &mut Criterion) {
    let n = 20_000;
    let s = setup(n);

    let mut group = c.benchmark_group("pipeline");
    group.sample_size(20);

    group.bench_with_input(BenchmarkId::new("simulate", n), &n, |b, _| {
        b.iter(|| simulate(&s.scene, &s.aperture, &s.geometry, 0.0, None).unwrap())
    });

    group.bench_with_input(BenchmarkId::new("build_windows", n), &n, |b, _| {
        b.iter(|| {
            WindowSet::build(
                &BaseWindow::new(WindowKind::Hann, s.aperture.half_extent()),
                &s.aperture,
            )
        })
    });

    group.bench_with_input(BenchmarkId::new("build_kernel", n), &n, |b, _| {
        b.iter(|| build_kernel(&s.aperture, &s.geometry))
    });

    let kernel = build_kernel(&s.aperture, &s.geometry);
    group.bench_with_input(BenchmarkId::new("build_windowed", n), &n, |b, _| {
        b.iter(|| build_windowed(&kernel, &s.windows).unwrap())
    });

    group.bench_with_input(BenchmarkId::new("assemble", n), &n, |b, _| {
        b.iter(|| assemble(&s.field, &s.aperture, &s.geometry, &s.windows).unwrap())
    });

    let sys = assemble(&s.field, &s.aperture, &s.geometry, &s.windows).unwrap();
    group.bench_function("solve_full", |b| {
        b.iter(|| black_box(solve_full(black_box(&sys), 1e-3, 1.0)))
    });

    group.bench_with_input(BenchmarkId::new("cell_end_to_end", n), &n, |b, _| {
        b.iter(|| {
            let field = simulate(&s.scene, &s.aperture, &s.geometry, 0.1, Some(7)).unwrap();
            let sys = assemble(&field, &s.aperture, &s.geometry, &s.windows).unwrap();
            black_box(solve_full(&sys, 1e-3, 1.0))
        })
    });

    group.finish();
}

criterion_group!(benches, bench_pipeline);
criterion_main!(benches);
