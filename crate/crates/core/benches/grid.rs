use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use sheargeo::bundle::{build_lorentz_firm, build_sasaki};
use sheargeo::einstein::{einstein_grid, einstein_profile, EinsteinParams};
use sheargeo::kahler::{make_base, BaseKind};
use sheargeo::par;
use sheargeo::tensor::connection::curvature_coordinate;
use sheargeo::tensor::metric::{MetricField, Scheme};

fn einstein_residual(c: &mut Criterion) {
    let p = EinsteinParams::taub_nut_default();
    let s = build_sasaki(make_base(BaseKind::S2Spherical, 1.0).unwrap()).unwrap();
    let g = build_lorentz_firm(&s, &einstein_profile(&p, (0.4, 2.1))).unwrap();
    let residual = |q: &Vec<f64>| {
        let r = curvature_coordinate(&g, q, Scheme::curvature()).unwrap();
        r.ricci.amax() + g.components(q).amax()
    };
    let mut group = c.benchmark_group("einstein_residual");
    group.sample_size(10);
    for per_axis in [4usize, 6] {
        let grid = einstein_grid(&g, per_axis);
        group.bench_with_input(BenchmarkId::new("parallel", grid.len()), &grid, |b, grid| {
            b.iter(|| black_box(par::map(grid, residual)))
        });
        group.bench_with_input(BenchmarkId::new("sequential", grid.len()), &grid, |b, grid| {
            b.iter(|| black_box(par::map_seq(grid, residual)))
        });
    }
    group.finish();
}

criterion_group!(benches, einstein_residual);
criterion_main!(benches);
