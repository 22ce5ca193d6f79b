//! Sequential vs data-parallel execution of the hot loops.

use std::hint::black_box;

use boxhunt_core::bounds::gamma_product_ln;
use boxhunt_core::continuous::sample_opt;
use boxhunt_core::montecarlo::{estimate_theta_with, SimConfig};
use boxhunt_core::{Execution, ProblemInstance, StrategyId};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("estimate_theta");
    group.sample_size(10);
    for (strategy, m, k) in [(StrategyId::OptUniform, 1000, 2), (StrategyId::Memoryless, 600, 6)] {
        let config = SimConfig::new(strategy, ProblemInstance::uniform(m, k), 20_000, 1);
        group.throughput(Throughput::Elements(config.trials));
        for (name, exec) in MODES {
            let id = BenchmarkId::new(name, format!("{strategy}-k{k}-m{m}"));
            group.bench_with_input(id, &config, |b, cfg| b.iter(|| estimate_theta_with(black_box(cfg), exec).unwrap()));
        }
    }
    group.finish();
}

fn gamma(c: &mut Criterion) {
    let mut group = c.benchmark_group("gamma_product_ln");
    let (a, b) = (1, 1_000_000);
    group.throughput(Throughput::Elements(b - a + 1));
    for (name, exec) in MODES {
        group.bench_function(name, |bench| bench.iter(|| gamma_product_ln(black_box(a), black_box(b), 0.37, exec)));
    }
    group.finish();
}

fn opt_grid(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_opt");
    group.sample_size(10);
    let n = 512;
    group.throughput(Throughput::Elements((n * n) as u64));
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| sample_opt(2, black_box(n), 3.0, exec).unwrap()));
    }
    let f = sample_opt(2, n, 3.0, Execution::Sequential).unwrap();
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new("theta", name), |b| b.iter(|| f.theta(2, exec)));
    }
    group.finish();
}

criterion_group!(benches, monte_carlo, gamma, opt_grid);
criterion_main!(benches);
