use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use tenttile::boundary::{build_boundary_graph, dimension_report, Variant};
use tenttile::geometry::{TentTile, Vec3, DEFAULT_POINT_BUDGET};
use tenttile::numberfield::registry_lookup;
use tenttile::spectral::{char_poly, dominant_eigenvalue};
use tenttile::tiling::{coverage_estimate, tiling_spec, Membership};
use tenttile_bench::{coarse_coverage, sr_adjacency};

fn spectral(c: &mut Criterion) {
    let small = sr_adjacency(1);
    let large = sr_adjacency(-4);
    c.bench_function("char_poly zeta_3", |b| b.iter(|| char_poly(black_box(&small))));
    c.bench_function("char_poly theta'_4", |b| b.iter(|| char_poly(black_box(&large))));
    c.bench_function("dominant_eigenvalue theta'_4", |b| {
        b.iter(|| dominant_eigenvalue(black_box(&large), 64).unwrap())
    });
}

fn boundary(c: &mut Criterion) {
    let mut g = c.benchmark_group("boundary");
    g.sample_size(10);
    for i in [1, 3, -1] {
        g.bench_function(format!("sr graph alpha_{i}"), |b| {
            b.iter(|| build_boundary_graph(black_box(i), Variant::Sr).unwrap())
        });
    }
    g.bench_function("dimension alpha_3", |b| b.iter(|| dimension_report(black_box(3)).unwrap()));
    g.finish();
}

fn geometry(c: &mut Criterion) {
    let tile = TentTile::new(registry_lookup(1).unwrap()).unwrap();
    c.bench_function("render alpha_1 cell 1e-2", |b| {
        b.iter(|| tile.render(black_box(1e-2), DEFAULT_POINT_BUDGET).unwrap())
    });
    let m = Membership::new(&tile).unwrap();
    let x = m.center() + Vec3::new(0.1, 0.05, 0.0);
    c.bench_function("membership alpha_1 eps 1e-9", |b| b.iter(|| m.contains(black_box(&x), 1e-9)));
}

fn tiling(c: &mut Criterion) {
    let mut g = c.benchmark_group("tiling");
    g.sample_size(10);
    let spec = tiling_spec(1).unwrap();
    let cfg = coarse_coverage(64);
    g.bench_function("coverage alpha_1 64^2", |b| b.iter(|| coverage_estimate(black_box(&spec), &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, spectral, boundary, geometry, tiling);
criterion_main!(benches);
