use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use poly_core::circuit::random::random_circuit;
use poly_core::heat::layered_termination;
use poly_core::rewrite::critical_pairs;
use poly_core::{load_preset, normalize, Circuit, Strategy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn circuits(nodes: usize, count: usize) -> Vec<Circuit> {
    let rds = load_preset("RDS").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    (0..count)
        .map(|k| random_circuit(rds.polygraph.signature(), 1 + k % 3, nodes, 4, &mut rng))
        .collect()
}

fn canonical(c: &mut Criterion) {
    let mut group = c.benchmark_group("canonical");
    for nodes in [4, 8, 12] {
        let cs = circuits(nodes, 32);
        group.bench_with_input(BenchmarkId::from_parameter(nodes), &cs, |b, cs| {
            b.iter(|| {
                cs.iter()
                    .map(|c| black_box(c).canonical().node_count())
                    .sum::<usize>()
            })
        });
    }
    group.finish();
}

fn normalize_rds(c: &mut Criterion) {
    let rds = load_preset("RDS").unwrap();
    let mut group = c.benchmark_group("normalize");
    for nodes in [6, 12] {
        let cs = circuits(nodes, 16);
        group.bench_with_input(BenchmarkId::from_parameter(nodes), &cs, |b, cs| {
            b.iter(|| {
                cs.iter()
                    .map(|c| {
                        normalize(&rds.polygraph, black_box(c), 10_000, Strategy::Leftmost)
                            .steps
                            .len()
                    })
                    .sum::<usize>()
            })
        });
    }
    group.finish();
}

fn certify(c: &mut Criterion) {
    let rds = load_preset("RDS").unwrap();
    c.bench_function("layered_termination/rds", |b| {
        b.iter(|| layered_termination(black_box(&rds.polygraph), &rds.layers).unwrap())
    });
    let lz2 = load_preset("LZ2").unwrap();
    c.bench_function("layered_termination/lz2", |b| {
        b.iter(|| layered_termination(black_box(&lz2.polygraph), &lz2.layers).unwrap())
    });
}

fn pairs(c: &mut Criterion) {
    let rds = load_preset("RDS").unwrap();
    let mut group = c.benchmark_group("critical_pairs");
    group.sample_size(10);
    group.bench_function("rds/6", |b| {
        b.iter(|| critical_pairs(black_box(&rds.polygraph), 6).len())
    });
    group.finish();
}

criterion_group!(benches, canonical, normalize_rds, certify, pairs);
criterion_main!(benches);
