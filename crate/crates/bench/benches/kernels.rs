//! Throughput of the hot kernels: field sampling, gap norms, moments and the
//! contact envelope.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use tresca_bench::{contact_case, field, geometry, probe_points, quadrature};
use tresca_core::dynamics::{integrate_envelope, minimal_mass};
use tresca_core::{l2_norms, moment_integral, FieldParams};

fn field_sample(c: &mut Criterion) {
    let mut group = c.benchmark_group("field_sample");
    for h in [1e-1, 1e-3, 1e-5] {
        let f = field(h);
        let pts = probe_points(h, 64);
        group.bench_with_input(BenchmarkId::from_parameter(h), &pts, |b, pts| {
            b.iter(|| {
                for p in pts {
                    // points off the field's domain just cost an error path
                    let _ = black_box(f.sample(*p));
                }
            })
        });
    }
    group.finish();
}

fn gap_norms(c: &mut Criterion) {
    let mut group = c.benchmark_group("l2_norms");
    group.sample_size(10);
    let spec = quadrature();
    for h in [1e-2, 1e-4] {
        let g = geometry(h);
        group.bench_with_input(BenchmarkId::from_parameter(h), &g, |b, g| {
            b.iter(|| l2_norms(&FieldParams::default(), g, &spec).unwrap())
        });
    }
    group.finish();
}

fn moments(c: &mut Criterion) {
    let g = geometry(1e-5);
    c.bench_function("moment_integral/1,2", |b| b.iter(|| moment_integral(black_box(1), 2, &g).unwrap()));
}

fn envelope(c: &mut Criterion) {
    let (d, opts) = contact_case();
    let mut group = c.benchmark_group("contact");
    group.sample_size(10);
    group.bench_function("integrate_envelope", |b| b.iter(|| integrate_envelope(black_box(&d), &opts).unwrap()));
    group.bench_function("minimal_mass", |b| b.iter(|| minimal_mass(black_box(&d)).unwrap()));
    group.finish();
}

criterion_group!(benches, field_sample, gap_norms, moments, envelope);
criterion_main!(benches);
