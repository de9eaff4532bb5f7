use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use pmas_bench::double_star;
use pmas_core::{
    decide_population_monotonic, gamma_table, random_weighted_graph, scan_forbidden_subgraphs,
    scan_weight_lemmas, Rational,
};

fn decide(c: &mut Criterion) {
    let mut group = c.benchmark_group("decide_double_star");
    for leaves in [1_000, 10_000, 100_000] {
        let g = double_star(leaves);
        group.bench_with_input(BenchmarkId::from_parameter(leaves), &g, |b, g| {
            b.iter(|| decide_population_monotonic(black_box(g)))
        });
    }
    group.finish();
}

fn scanners(c: &mut Criterion) {
    let pool = [
        Rational::one(),
        Rational::new(3, 2),
        Rational::from_integer(2),
    ];
    let mut group = c.benchmark_group("scan");
    for n in [10, 20, 40] {
        let g = random_weighted_graph(n, &Rational::new(1, 4), &pool, 1).unwrap();
        group.bench_with_input(BenchmarkId::new("weight_lemmas", n), &g, |b, g| {
            b.iter(|| scan_weight_lemmas(black_box(g)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("forbidden", n), &g, |b, g| {
            b.iter(|| scan_forbidden_subgraphs(black_box(g)).unwrap())
        });
    }
    group.finish();
}

fn gamma(c: &mut Criterion) {
    let pool = [
        Rational::one(),
        Rational::new(3, 2),
        Rational::from_integer(2),
    ];
    let mut group = c.benchmark_group("gamma_table");
    for n in [8, 12, 16] {
        let g = random_weighted_graph(n, &Rational::new(1, 2), &pool, 2).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| gamma_table(black_box(g)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, decide, scanners, gamma);
criterion_main!(benches);
