use afftool_bench::sample_map;
use afftool_core::fixtures::example_one;
use afftool_core::structure::split_cyclotomic_base;
use afftool_core::verify::{affine_evaluator, commutation_residual, GridSpec};
use afftool_core::classify;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn pipeline(c: &mut Criterion) {
    let mut g = c.benchmark_group("classify");
    for n in [3, 5, 8] {
        let f = sample_map(n);
        g.bench_with_input(BenchmarkId::new("classify", n), &f, |b, f| b.iter(|| classify(black_box(f))));
        g.bench_with_input(BenchmarkId::new("split_base", n), &f, |b, f| {
            b.iter(|| split_cyclotomic_base(black_box(f)))
        });
    }
    g.finish();

    let f = example_one();
    let grid = GridSpec::new(3, 32, 0).expect("positive grid");
    let ev = affine_evaluator(&f).expect("numeric translation");
    c.bench_function("residual/example_one_32", |b| {
        b.iter(|| commutation_residual(&ev, &ev, black_box(&grid)))
    });
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
