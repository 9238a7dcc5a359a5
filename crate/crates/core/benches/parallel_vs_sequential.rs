//! One pool thread vs the default pool on the two heaviest batch stages.
//! Build with `--no-default-features` to time the plain-iterator fallback.

use std::hint::black_box;

use asgap::ela::ela_all;
use asgap::par;
use asgap::portfolio::{run_portfolio, Portfolio, PortfolioName, RunSettings};
use asgap::suite::{evaluate_sample, generate_suite, lhs_sample, AffineInstance, SuiteConfig};
use criterion::{criterion_group, criterion_main, Criterion};

fn problems() -> Vec<AffineInstance> {
    let cfg = SuiteConfig {
        classes: vec![1, 3, 8, 15, 21, 24],
        instances: vec![1],
        alphas: vec![0.5],
        dim: 2,
    };
    generate_suite(&cfg)
        .unwrap()
        .problems
        .iter()
        .map(|e| e.instantiate().unwrap())
        .collect()
}

fn bench(c: &mut Criterion) {
    let problems = problems();
    let portfolio = Portfolio::new(PortfolioName::TwoDeTwoPso);
    let settings = RunSettings {
        runs: 2,
        budget: 30,
        pop_size: 10,
        master_seed: 0,
    };
    let x = lhs_sample(2, 100, 0);
    let samples: Vec<_> = problems
        .iter()
        .map(|p| evaluate_sample(p, &x, 0).unwrap())
        .collect();

    let mut runs = c.benchmark_group("portfolio_runs");
    runs.sample_size(10);
    for (label, workers) in [("sequential", 1), ("parallel", 0)] {
        runs.bench_function(label, |b| {
            b.iter(|| {
                par::with_workers(workers, || {
                    par::map(&problems, |p| run_portfolio(p, &portfolio, &settings).unwrap())
                })
            })
        });
    }
    runs.finish();

    let mut feats = c.benchmark_group("ela_features");
    feats.sample_size(10);
    for (label, workers) in [("sequential", 1), ("parallel", 0)] {
        feats.bench_function(label, |b| {
            b.iter(|| par::with_workers(workers, || par::map(&samples, |s| black_box(ela_all(s, true)))))
        });
    }
    feats.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
