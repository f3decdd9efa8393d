use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gspecies::counterexample::{counterexample_search, DualConvention};
use gspecies::fixtures::c3_gsp;
use gspecies::species::c3_species;
use gspecies::verify::{conjecture_suites, dual_engine_suite};
use gspecies::Exec;
use std::hint::black_box;

fn modes() -> [(&'static str, Exec); 2] {
    [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)]
}

fn bench(c: &mut Criterion) {
    let b = c3_species().exchange_matrix().unwrap();
    let g = c3_gsp();

    let mut group = c.benchmark_group("conjectures_c3_len5");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |bn, &exec| bn.iter(|| black_box(conjecture_suites(&b, 5, exec, 2))));
    }
    group.finish();

    let mut group = c.benchmark_group("dual_engine_c3_len4");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |bn, &exec| bn.iter(|| black_box(dual_engine_suite("c3", &g, 4, exec))));
    }
    group.finish();

    let mut group = c.benchmark_group("counterexample_m1");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |bn, &exec| bn.iter(|| black_box(counterexample_search(&[1], DualConvention::Transpose, exec))));
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
