use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lambdap_bench::{dense_pair, family};
use lambdap_core::criteria::{check_translation, full_report, ScanConfig};
use lambdap_core::nets::greedy_net;
use lambdap_core::{alpha_distance, NormParams};

fn distance(c: &mut Criterion) {
    let params = NormParams::new(1.0).unwrap();
    let mut group = c.benchmark_group("alpha_distance");
    for cells in [1usize << 10, 1 << 14] {
        let (a, b) = dense_pair(cells);
        group.bench_with_input(BenchmarkId::from_parameter(cells), &cells, |bench, _| {
            bench.iter(|| alpha_distance(black_box(&a), black_box(&b), params).unwrap())
        });
    }
    group.finish();
}

fn reports(c: &mut Criterion) {
    let config = ScanConfig::default();
    let mut group = c.benchmark_group("full_report");
    group.sample_size(10);
    for spec in ["f:k=1..100", "u:k=1..64", "h:k=1..8,K=9"] {
        let fam = family(spec, 1.0);
        group.bench_function(spec, |bench| {
            bench.iter(|| full_report(black_box(&fam), &[0.5], &config).unwrap())
        });
    }
    group.finish();
}

fn translation(c: &mut Criterion) {
    let fam = family("u:k=1..64", 1.0);
    let config = ScanConfig::default();
    c.bench_function("check_translation/u64", |bench| {
        bench.iter(|| check_translation(black_box(&fam), 0.5, &config).unwrap())
    });
}

fn nets(c: &mut Criterion) {
    let mut group = c.benchmark_group("greedy_net");
    group.sample_size(10);
    for spec in ["g:k=1..100", "u:k=1..64"] {
        let fam = family(spec, 1.0);
        group.bench_function(spec, |bench| {
            bench.iter(|| greedy_net(black_box(&fam), 0.5).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, distance, reports, translation, nets);
criterion_main!(benches);
