use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use qupid_core::datasets::{generate_orbit, OrbitParams, SeededRng};
use qupid_core::homology::{rips_h0, rips_h1};
use qupid_core::{apply, build_log_grid, build_uniform_grid, quantize_points, BPPoint, QuantizedMeasure, TransformKind};

fn points(n: usize, seed: u64) -> Vec<BPPoint> {
    let mut rng = SeededRng::new(seed);
    (0..n).map(|_| BPPoint::new(rng.next_f64(), rng.next_f64())).collect()
}

fn measure(rows: usize, cols: usize, seed: u64) -> QuantizedMeasure {
    let mut rng = SeededRng::new(seed);
    let v = (0..rows * cols).map(|_| rng.below(5) as f64).collect();
    QuantizedMeasure::from_vec(rows, cols, v).unwrap()
}

fn bench_quantize(c: &mut Criterion) {
    let corners = [BPPoint::new(0.0, 0.0), BPPoint::new(1.0, 1.0)];
    let uniform = build_uniform_grid(&corners, 32, 32).unwrap();
    let log = build_log_grid(&corners, 32, 32, [500.0, 500.0]).unwrap();
    let mut group = c.benchmark_group("quantize");
    for n in [1000, 2000, 4000] {
        let pts = points(n, n as u64);
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("uniform_32x32", n), &pts, |b, pts| {
            b.iter(|| quantize_points(black_box(pts), &uniform))
        });
        group.bench_with_input(BenchmarkId::new("log_32x32", n), &pts, |b, pts| {
            b.iter(|| quantize_points(black_box(pts), &log))
        });
    }
    group.finish();
}

fn bench_transforms(c: &mut Criterion) {
    let m = measure(32, 32, 1);
    let mut group = c.benchmark_group("transform_32x32");
    for kind in TransformKind::ALL {
        group.bench_function(kind.name(), |b| b.iter(|| apply(black_box(&m), kind).unwrap()));
    }
    group.finish();

    let mut group = c.benchmark_group("fft");
    for (r, s) in [(32, 32), (32, 64), (64, 64), (128, 128)] {
        let m = measure(r, s, 2);
        group.throughput(Throughput::Elements((r * s) as u64));
        group.bench_with_input(BenchmarkId::from_parameter(format!("{r}x{s}")), &m, |b, m| {
            b.iter(|| apply(black_box(m), TransformKind::Fourier).unwrap())
        });
    }
    group.finish();
}

fn bench_rips(c: &mut Criterion) {
    let cloud = generate_orbit(&OrbitParams::new(3.5, 300, 0).unwrap());
    let mut group = c.benchmark_group("rips_orbit_300");
    group.sample_size(10);
    group.bench_function("h0", |b| b.iter(|| rips_h0(black_box(&cloud))));
    group.bench_function("h1_scale_0.5", |b| b.iter(|| rips_h1(black_box(&cloud), 0.5).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_quantize, bench_transforms, bench_rips);
criterion_main!(benches);
