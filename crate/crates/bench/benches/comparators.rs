use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};

use advsort::baselines::{naive_quicksort, tournament_order};
use advsort::netsort::round_sort;
use advsort::roundselect::{select_combined, DESK_C};
use advsort::rsort::{rselect, rsort, RSortParams};
use advsort::{InstanceFamily, PolicyKind};
use advsort_bench::{items, oracle};

fn sorts_honest_uniform(c: &mut Criterion) {
    let mut g = c.benchmark_group("sort-honest-uniform");
    g.sample_size(10);
    let family = InstanceFamily::UniformSpread;
    for n in [256usize, 1024] {
        let ids = items(n);
        g.bench_with_input(BenchmarkId::new("tournament", n), &n, |b, &n| {
            b.iter_batched(
                || oracle(&family, PolicyKind::Honest, n, 7),
                |mut o| black_box(tournament_order(&mut o, &ids)),
                BatchSize::SmallInput,
            );
        });
        g.bench_with_input(BenchmarkId::new("quicksort", n), &n, |b, &n| {
            b.iter_batched(
                || oracle(&family, PolicyKind::Honest, n, 7),
                |mut o| black_box(naive_quicksort(&mut o, &ids, 11)),
                BatchSize::SmallInput,
            );
        });
        g.bench_with_input(BenchmarkId::new("rsort-desk", n), &n, |b, &n| {
            let params = RSortParams::desk(11);
            b.iter_batched(
                || oracle(&family, PolicyKind::Honest, n, 7),
                |mut o| black_box(rsort(&mut o, &ids, &params).order),
                BatchSize::SmallInput,
            );
        });
        g.bench_with_input(BenchmarkId::new("roundsort-d9", n), &n, |b, &n| {
            b.iter_batched(
                || oracle(&family, PolicyKind::Honest, n, 7),
                |mut o| black_box(round_sort(&mut o, &ids, 9).unwrap().order),
                BatchSize::SmallInput,
            );
        });
    }
    g.finish();
}

fn sorts_under_attack(c: &mut Criterion) {
    let mut g = c.benchmark_group("sort-starver-all-equal");
    g.sample_size(10);
    let family = InstanceFamily::AllEqual;
    let n = 512usize;
    let ids = items(n);
    g.bench_with_input(BenchmarkId::new("quicksort", n), &n, |b, &n| {
        b.iter_batched(
            || oracle(&family, PolicyKind::PivotStarver, n, 7),
            |mut o| black_box(naive_quicksort(&mut o, &ids, 11)),
            BatchSize::SmallInput,
        );
    });
    g.bench_with_input(BenchmarkId::new("rsort-desk", n), &n, |b, &n| {
        let params = RSortParams::desk(11);
        b.iter_batched(
            || oracle(&family, PolicyKind::PivotStarver, n, 7),
            |mut o| black_box(rsort(&mut o, &ids, &params).order),
            BatchSize::SmallInput,
        );
    });
    g.finish();
}

fn selection_honest_uniform(c: &mut Criterion) {
    let mut g = c.benchmark_group("select-honest-uniform");
    g.sample_size(10);
    let family = InstanceFamily::UniformSpread;
    let n = 4096usize;
    let ids = items(n);
    let rank = n / 2;
    g.bench_with_input(BenchmarkId::new("rselect-desk", n), &n, |b, &n| {
        let params = RSortParams::desk(11);
        b.iter_batched(
            || oracle(&family, PolicyKind::Honest, n, 7),
            |mut o| black_box(rselect(&mut o, &ids, rank, &params).unwrap().item),
            BatchSize::SmallInput,
        );
    });
    g.bench_with_input(BenchmarkId::new("select-d3", n), &n, |b, &n| {
        b.iter_batched(
            || oracle(&family, PolicyKind::Honest, n, 7),
            |mut o| {
                black_box(
                    select_combined(&mut o, &ids, rank, 3, DESK_C, 11)
                        .unwrap()
                        .item,
                )
            },
            BatchSize::SmallInput,
        );
    });
    g.finish();
}

criterion_group!(
    benches,
    sorts_honest_uniform,
    sorts_under_attack,
    selection_honest_uniform
);
criterion_main!(benches);
