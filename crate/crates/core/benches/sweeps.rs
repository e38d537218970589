use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qva_core::par::Exec;
use qva_core::ratfunc::RationalFn;
use qva_core::vacuum::{required_trunc, verify_pbw_independence, verify_relations, AhContext};
use std::hint::black_box;

fn mobius() -> AhContext {
    let g = RationalFn::from_ints(&[-2, 1], &[1, -2]).unwrap();
    AhContext::from_g(&g, required_trunc(3, -3)).unwrap()
}

fn sweeps(c: &mut Criterion) {
    let ctx = mobius();
    let mut group = c.benchmark_group("relations_deg3");
    group.sample_size(10);
    for (name, exec) in [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| {
                // cold φ cache each round so both paths do the same work
                ctx.clear_caches();
                black_box(verify_relations(&ctx, 3, (-3, 4), exec))
            })
        });
    }
    group.finish();

    let mut group = c.benchmark_group("pbw_rank_deg4");
    group.sample_size(10);
    for (name, exec) in [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| {
                ctx.clear_caches();
                black_box(verify_pbw_independence(&ctx, 4, exec))
            })
        });
    }
    group.finish();
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
