use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use esdp_bench::sequence_db;
use esdp_core::{adaptive_mine, mine_prefixspan};

fn prefixspan(c: &mut Criterion) {
    let mut group = c.benchmark_group("prefixspan");
    for records in [100, 400, 1600] {
        let db = sequence_db(7, records, 12);
        let min = (records / 20) as u64;
        group.bench_with_input(BenchmarkId::from_parameter(records), &db, |b, db| {
            b.iter(|| mine_prefixspan(black_box(db), min).unwrap())
        });
    }
    group.finish();
}

fn adaptive(c: &mut Criterion) {
    let db = sequence_db(11, 400, 12);
    c.bench_function("adaptive_50", |b| b.iter(|| adaptive_mine(black_box(&db), 50)));
}

criterion_group!(benches, prefixspan, adaptive);
criterion_main!(benches);
