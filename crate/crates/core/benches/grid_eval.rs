use compass_core::fock_oracle::oracle_wigner;
use compass_core::states::fock_default;
use compass_core::wigner::wigner_closed_form;
use compass_core::{
    canonical_pscs, ComplexAmplitude, PhaseSpaceGrid, ScalarField, SubtractionIndex,
};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

fn wigner_grid(c: &mut Criterion) {
    let p = canonical_pscs(
        ComplexAmplitude::real(3.0).unwrap(),
        SubtractionIndex::new(1).unwrap(),
    )
    .unwrap();
    let mut group = c.benchmark_group("wigner_closed_form");
    group.sample_size(20);
    for n in [101usize, 401] {
        let grid = PhaseSpaceGrid::square(7.0, n).unwrap();
        let w = |x: f64, y: f64| wigner_closed_form(&p, Complex64::new(x, y));
        group.bench_with_input(BenchmarkId::new("parallel", n), &grid, |b, g| {
            b.iter(|| ScalarField::from_fn(black_box(g), w))
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &grid, |b, g| {
            b.iter(|| ScalarField::from_fn_sequential(black_box(g), w))
        });
    }
    group.finish();

    let v = fock_default(&p).unwrap();
    let grid = PhaseSpaceGrid::square(7.0, 41).unwrap();
    let o = |x: f64, y: f64| oracle_wigner(&v, Complex64::new(x, y)).unwrap();
    let mut group = c.benchmark_group("wigner_oracle");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| ScalarField::from_fn(black_box(&grid), o))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| ScalarField::from_fn_sequential(black_box(&grid), o))
    });
    group.finish();
}

criterion_group!(benches, wigner_grid);
criterion_main!(benches);
