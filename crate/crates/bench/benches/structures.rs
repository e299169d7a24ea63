use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use wincuckoo::models::{Instance, InstanceSpec, Scheme};
use wincuckoo::orient::AllocationState;
use wincuckoo::{LsaTable, ModelParams};

const N: usize = 100_000;

fn flow_engine(c: &mut Criterion) {
    let mut group = c.benchmark_group("flow engine");
    group.sample_size(10);
    for (scheme, m) in [(Scheme::Windows, 90_000), (Scheme::Blocks, 85_000)] {
        let inst = Instance::generate(InstanceSpec::new(scheme, N, m, 2, 2, 1).unwrap()).unwrap();
        let graph = inst.flow_graph().unwrap();
        group.bench_function(format!("{scheme} n=1e5 m={m}"), |b| {
            b.iter(|| AllocationState::from_graph(black_box(&graph)).unwrap().is_saturated())
        });
    }
    group.finish();
}

fn lsa(c: &mut Criterion) {
    let params = ModelParams::new(2, 2).unwrap();
    let mut group = c.benchmark_group("lsa");
    group.sample_size(10);
    group.bench_function("fill n=1e5 to 0.9", |b| {
        b.iter(|| {
            let mut table: LsaTable<u64> = LsaTable::new(N, params, 3).unwrap();
            for key in 0..(N as u64 * 9 / 10) {
                table.insert(key, key).unwrap();
            }
            table
        })
    });

    let mut full: LsaTable<u64> = LsaTable::new(N, params, 3).unwrap();
    let m = N as u64 * 9 / 10;
    for key in 0..m {
        full.insert(key, key).unwrap();
    }
    group.bench_function("lookup hit at load 0.9", |b| {
        let mut key = 0;
        b.iter(|| {
            key = (key + 7919) % m;
            black_box(full.lookup(key))
        })
    });
    group.bench_function("delete and reinsert at load 0.9", |b| {
        b.iter_batched_ref(
            || full.clone(),
            |t| {
                t.delete(17);
                t.insert(17, 17).unwrap()
            },
            BatchSize::LargeInput,
        )
    });
    group.finish();
}

criterion_group!(benches, flow_engine, lsa);
criterion_main!(benches);
