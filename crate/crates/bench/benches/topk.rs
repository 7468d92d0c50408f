use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use topk_bench::{collection, index, patterns};
use topk_core::{QueryOptions, Strategy, Variant};

fn build(c: &mut Criterion) {
    let docs = collection(200_000, 200, 1);
    let mut group = c.benchmark_group("build");
    group.sample_size(10);
    group.throughput(Throughput::Bytes(200_000));
    for variant in [Variant::Light, Variant::Xlight] {
        group.bench_with_input(BenchmarkId::from_parameter(variant), &variant, |b, &v| {
            b.iter(|| index(black_box(&docs), 400, v))
        });
    }
    group.finish();
}

fn query(c: &mut Criterion) {
    let docs = collection(1_000_000, 1000, 2);
    for g_prime in [200, 400] {
        for variant in [Variant::Light, Variant::Xlight] {
            let idx = index(&docs, g_prime, variant);
            for (m, k) in [(3, 1), (3, 10), (8, 10)] {
                let ps = patterns(&idx, 1000, m, 3);
                let mut group = c.benchmark_group(format!("query/g{g_prime}/{variant}/m{m}/k{k}"));
                group.throughput(Throughput::Elements(ps.len() as u64));
                for strategy in Strategy::ALL {
                    let o = QueryOptions {
                        strategy,
                        use_sgst: true,
                    };
                    group.bench_function(strategy.to_string(), |b| {
                        b.iter(|| {
                            for p in &ps {
                                black_box(idx.query(p, k, o).unwrap());
                            }
                        })
                    });
                }
                group.finish();
            }
        }
    }
}

criterion_group!(benches, build, query);
criterion_main!(benches);
