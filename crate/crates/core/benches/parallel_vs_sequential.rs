use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fri_core::analysis::compare_methods_with;
use fri_core::bench::{build_example, run_suite_with, search_witness_with, SearchBudget, Target};
use fri_core::par::Execution;
use fri_core::{InterpolationConfig, MethodId};
use std::hint::black_box;

const PATHS: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn compare(c: &mut Criterion) {
    let inst = build_example(6, 42).unwrap();
    let cfg = InterpolationConfig::default();
    let mut g = c.benchmark_group("compare_methods");
    for (name, exec) in PATHS {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| compare_methods_with(exec, black_box(&inst.rb), black_box(&inst.obs), &MethodId::ALL, &cfg))
        });
    }
    g.finish();
}

fn search(c: &mut Criterion) {
    // MACI never fires, so every search runs its whole budget
    let budget = SearchBudget { max_samples: 2_000, seed: 42 };
    let cfg = InterpolationConfig::default();
    let mut g = c.benchmark_group("search_2000_samples");
    g.sample_size(10);
    for (name, exec) in PATHS {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| search_witness_with(exec, 1, Target::Abnormal(MethodId::Maci), &budget, &cfg).unwrap())
        });
    }
    g.finish();
}

fn suite(c: &mut Criterion) {
    let cfg = InterpolationConfig::default();
    let mut g = c.benchmark_group("suite");
    g.sample_size(10);
    for (name, exec) in PATHS {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_suite_with(exec, &MethodId::ALL, 42, &SearchBudget::default(), &cfg).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, compare, search, suite);
criterion_main!(benches);
