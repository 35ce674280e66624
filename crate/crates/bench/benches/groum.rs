use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use esdp_bench::groums;
use esdp_core::patt_explorer;

fn explorer(c: &mut Criterion) {
    let mut group = c.benchmark_group("patt_explorer");
    for graphs in [20, 80] {
        let data = groums(5, graphs, 8, 6);
        group.bench_with_input(BenchmarkId::from_parameter(graphs), &data, |b, data| {
            b.iter(|| patt_explorer(black_box(data), 3, Some(4)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, explorer);
criterion_main!(benches);
