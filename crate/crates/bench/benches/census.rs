use criterion::{criterion_group, criterion_main, Criterion};
use fronts::zeroset::{trace_zero_curve, verify_theorem_c, CensusOptions, ZeroFunction};
use fronts::Tolerances;
use fronts_bench::surface;

fn census(c: &mut Criterion) {
    let mut group = c.benchmark_group("census");
    group.sample_size(10);
    let spec = surface("bumpy_torus");
    for grid in [64, 128] {
        group.bench_function(format!("trace bumpy torus, grid {grid}"), |b| {
            b.iter(|| trace_zero_curve(&spec, ZeroFunction::Hessian, grid, &Tolerances::default()).unwrap())
        });
        let opts = CensusOptions {
            grid,
            ..Default::default()
        };
        group.bench_function(format!("census bumpy torus, grid {grid}"), |b| {
            b.iter(|| verify_theorem_c(&spec, &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, census);
criterion_main!(benches);
