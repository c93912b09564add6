//! Sequential versus parallel fan-out for the two data-parallel hot spots:
//! population fitness evaluation and order-level benchmark runs.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use palletpack::benchmark::run_benchmark;
use palletpack::constructive::build_base_solution;
use palletpack::ga::{initialize_population, GaProblem, Individual, Population};
use palletpack::par::Execution;
use palletpack::superitems::build_superitems;
use palletpack::synth::{synthetic_order, synthetic_suite, SynthConfig};
use palletpack::{RunConfig, Stage};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn population_fitness(c: &mut Criterion) {
    let cfg = RunConfig::default();
    // a 60-item order whose base leaves a residual
    let synth = SynthConfig {
        min_items: 60,
        max_items: 60,
        ..SynthConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (items, units, base) = loop {
        let items = synthetic_order("bench", &synth, &mut rng).items();
        let units = build_superitems(&items, &cfg.pallet, &cfg.superitems);
        let base = build_base_solution(&units, &items, &cfg.pallet, &cfg.constructive);
        if !base.residual.is_empty() {
            break (items, units, base);
        }
    };
    let problem = GaProblem::new(&items, &units, &base, cfg.pallet, cfg.kpi);
    let chromosomes = initialize_population(&problem, &cfg.ga, &mut ChaCha8Rng::seed_from_u64(1));

    let mut group = c.benchmark_group("population_fitness");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                let mut pop = Population {
                    members: chromosomes.iter().cloned().map(Individual::new).collect(),
                };
                pop.evaluate(&problem, exec)
            })
        });
    }
    group.finish();
}

fn order_batch(c: &mut Criterion) {
    let orders = synthetic_suite(16, 11, &SynthConfig::default());
    let mut cfg = RunConfig {
        stage: Stage::HybridGaPp,
        ..RunConfig::default()
    };
    cfg.ga.population_size = 20;
    cfg.ga.generations = 5;
    cfg.execution = Execution::Sequential;

    let mut group = c.benchmark_group("order_batch");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_benchmark(&orders, &cfg, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, population_fitness, order_batch);
criterion_main!(benches);
