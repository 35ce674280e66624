use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use esdp_bench::repository;
use esdp_core::repository::{parse, serialize};
use esdp_core::{abstract_query, render_skeleton, search, QueryContext};

fn cold_query(c: &mut Criterion) {
    let xml = serialize(&repository(3, 1000));
    let ctx = QueryContext::default().with_var("file", "File");
    c.bench_function("cold_query_1000", |b| {
        b.iter(|| {
            let repo = parse(black_box(&xml)).unwrap();
            let q = abstract_query("file.close();", &ctx).unwrap();
            let recs = search(&q, &repo, 5);
            recs.first().map(|r| render_skeleton(r, &q).to_text())
        })
    });
}

fn warm_search(c: &mut Criterion) {
    let repo = repository(3, 1000);
    let ctx = QueryContext::default().with_var("file", "File");
    let q = abstract_query("file.close();", &ctx).unwrap();
    c.bench_function("warm_search_1000", |b| b.iter(|| search(black_box(&q), &repo, 5)));
}

criterion_group!(benches, cold_query, warm_search);
criterion_main!(benches);
