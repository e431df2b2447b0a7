use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use poisson_laguerre::coupling::DensityCoupling;
use poisson_laguerre::rng::StreamKey;
use poisson_laguerre::stabilization::hmax_value;
use poisson_laguerre::tessellation::{build_dual, build_laguerre, default_frame};
use poisson_laguerre::{HeightDensity, Point, Region, Shape};
use poisson_laguerre_bench::beta_config;
use std::hint::black_box;

fn tessellation(c: &mut Criterion) {
    let mut g = c.benchmark_group("tessellation");
    for n in [100usize, 1000, 5000] {
        let (pts, w) = beta_config(n, 1);
        g.bench_with_input(BenchmarkId::new("build_dual", n), &pts, |b, p| b.iter(|| build_dual(black_box(p)).unwrap()));
        let dual = build_dual(&pts).unwrap();
        let frame = default_frame(&w);
        g.bench_with_input(BenchmarkId::new("build_laguerre", n), &dual, |b, d| b.iter(|| build_laguerre(black_box(d), &frame)));
    }
    g.finish();
}

fn envelope(c: &mut Criterion) {
    let (pts, w) = beta_config(400, 2);
    let center = w.center();
    let shifted: Vec<_> = pts.iter().map(|p| poisson_laguerre::WeightedPoint::new(p.id, p.v - center, p.h)).collect();
    c.bench_function("hmax_value/400", |b| b.iter(|| hmax_value(black_box(&shifted), 2.0).unwrap()));
}

fn densities(c: &mut Criterion) {
    let beta = HeightDensity::beta(2, 0.5).unwrap();
    let gauss = HeightDensity::gaussian(2);
    c.bench_function("frac_integral/beta", |b| b.iter(|| beta.frac_integral(black_box(2.0), 1.5).unwrap()));
    c.bench_function("frac_integral/gaussian_numeric", |b| b.iter(|| gauss.frac_integral_numeric(black_box(1.5), 0.0).unwrap()));
}

fn coupling(c: &mut Criterion) {
    let f = HeightDensity::beta(2, 0.5).unwrap();
    let g = HeightDensity::beta(2, 0.4).unwrap();
    let k = Region::new(Shape::disk(Point::ORIGIN, 4.0), 0.0, 4.0);
    let cp = DensityCoupling::new(&f, &g, k, Vec::new()).unwrap();
    let mut i = 0u64;
    c.bench_function("density_coupling/sample", |b| {
        b.iter(|| {
            i += 1;
            cp.sample(StreamKey::new(3).child("rep", i))
        })
    });
}

criterion_group!(benches, tessellation, envelope, densities, coupling);
criterion_main!(benches);
