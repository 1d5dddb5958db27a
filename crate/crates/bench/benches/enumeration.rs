use bds_bench::{count_length, instances};
use bds_core::enumerate::WalkOptions;
use bds_core::{decomposition, extender, fixtures, language, periodic, Word};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn count_words(c: &mut Criterion) {
    let mut group = c.benchmark_group("count_words");
    for (name, spec) in instances() {
        let n = count_length(name);
        group.bench_with_input(BenchmarkId::new(name, n), &spec, |b, spec| {
            b.iter(|| language::count_words(spec, black_box(n)).unwrap())
        });
    }
    group.finish();
}

fn count_words_sequential(c: &mut Criterion) {
    let spec = fixtures::golden_mean();
    let opts = WalkOptions {
        parallel: false,
        ..WalkOptions::default()
    };
    c.bench_function("count_words_sequential/ceil_n_half/20", |b| {
        b.iter(|| language::count_words_with(&spec, black_box(20), &opts).unwrap())
    });
}

fn enumerate_per(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_per");
    for (name, spec) in instances().into_iter().take(2) {
        for n in [12, 18] {
            group.bench_with_input(BenchmarkId::new(name, n), &spec, |b, spec| {
                b.iter(|| periodic::enumerate_per(spec, black_box(n)).unwrap())
            });
        }
    }
    group.finish();
}

fn searches(c: &mut Criterion) {
    let spec = fixtures::golden_mean();
    c.bench_function("sync_check/ceil_n_half/m1_l8", |b| {
        b.iter(|| decomposition::sync_check(&spec, 1, black_box(8)))
    });
    let v: Word = "101".parse().unwrap();
    let w: Word = "100".parse().unwrap();
    c.bench_function("zero_pad_containment/ceil_n_half/l5", |b| {
        b.iter(|| extender::zero_pad_containment(&spec, &v, &w, black_box(5)).unwrap())
    });
}

criterion_group!(benches, count_words, count_words_sequential, enumerate_per, searches);
criterion_main!(benches);
