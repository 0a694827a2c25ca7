use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use bilage::kernel_finite::kernel_residue;
use bilage::limits::{hard_edge_uint, square_grid};
use bilage::{par, EnsembleParams};

fn kernel_grid(c: &mut Criterion) {
    let params = EnsembleParams::new(0.5, 2.0, 20).unwrap();
    let points = square_grid(&[0.25, 0.5, 1.0, 2.0, 4.0]);
    let eval = |&(x, y): &(f64, f64)| kernel_residue(&params, x, y).unwrap();
    let mut g = c.benchmark_group("kernel_residue_grid");
    g.bench_function(BenchmarkId::new("par_map", points.len()), |b| {
        b.iter(|| par::map(&points, eval))
    });
    g.bench_function(BenchmarkId::new("sequential", points.len()), |b| {
        b.iter(|| par::map_sequential(&points, eval))
    });
    g.finish();
}

fn hard_edge_grid(c: &mut Criterion) {
    let points = square_grid(&[0.5, 1.0, 2.0]);
    let eval = |&(x, y): &(f64, f64)| hard_edge_uint(0.5, 2.0, x, y).unwrap();
    let mut g = c.benchmark_group("hard_edge_uint_grid");
    g.sample_size(20);
    g.bench_function(BenchmarkId::new("par_map", points.len()), |b| {
        b.iter(|| par::map(&points, eval))
    });
    g.bench_function(BenchmarkId::new("sequential", points.len()), |b| {
        b.iter(|| par::map_sequential(&points, eval))
    });
    g.finish();
}

criterion_group!(benches, kernel_grid, hard_edge_grid);
criterion_main!(benches);
