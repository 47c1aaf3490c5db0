use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use stcvrp::exact::brute_force;
use stcvrp::ga::{self, GaConfig};
use stcvrp::evaluate;
use stcvrp_bench::{grid, random_solutions};

fn simulate(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate");
    for (n, k) in [(25, 5), (50, 5), (100, 8), (200, 10)] {
        let inst = grid(n, k, 1);
        let solutions = random_solutions(&inst, 64, 2);
        group.bench_with_input(BenchmarkId::from_parameter(format!("N{n}_K{k}")), &solutions, |b, sols| {
            let mut i = 0;
            b.iter(|| {
                i = (i + 1) % sols.len();
                black_box(evaluate(&inst, &sols[i]).unwrap().makespan)
            })
        });
    }
    group.finish();
}

fn genetic_search(c: &mut Criterion) {
    let inst = grid(50, 5, 1);
    let config = GaConfig {
        max_generations: 200,
        ..GaConfig::for_instance(&inst).with_seed(3)
    };
    let mut group = c.benchmark_group("ga");
    group.sample_size(10);
    group.bench_function("N50_K5_200gen", |b| {
        b.iter(|| black_box(ga::solve(&inst, &config).unwrap().best_makespan))
    });
    group.finish();
}

fn exhaustive(c: &mut Criterion) {
    let inst = grid(6, 2, 4);
    let mut group = c.benchmark_group("brute_force");
    group.sample_size(10);
    group.bench_function("N6_K2", |b| {
        b.iter(|| black_box(brute_force(&inst, 1_000_000).unwrap().1))
    });
    group.finish();
}

criterion_group!(benches, simulate, genetic_search, exhaustive);
criterion_main!(benches);
