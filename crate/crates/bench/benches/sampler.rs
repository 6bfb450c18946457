use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use inarao_core::{
    arms_draw, delta_probability, eta_conditional_pmf, run_chain, simulate, transition_log_pmf,
    AlphaKernel, Contamination, CountSeries, Domain, GibbsConfig, Hyperparams, InarParams,
    Initialization, LambdaKernel, LatentConfig, Outlier,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn series(n: usize) -> CountSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = simulate(
        &InarParams::new(0.85, 1.0).unwrap(),
        n,
        Initialization::Stationary,
        &mut rng,
    )
    .unwrap();
    let outliers = vec![
        Outlier { time: 9, size: 7 },
        Outlier { time: 29, size: 13 },
        Outlier { time: 75, size: 18 },
    ];
    inarao_core::contaminate(&x, &Contamination::new(outliers).unwrap()).unwrap()
}

fn transition(c: &mut Criterion) {
    let params = InarParams::new(0.85, 1.0).unwrap();
    let mut group = c.benchmark_group("transition_log_pmf");
    for (prev, curr) in [(3, 4), (12, 15), (60, 55)] {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{prev}->{curr}")),
            &(prev, curr),
            |b, &(p, q)| b.iter(|| transition_log_pmf(black_box(p), black_box(q), &params)),
        );
    }
    group.finish();
}

fn kernels(c: &mut Criterion) {
    let y = series(100);
    let hyper = Hyperparams::default();
    c.bench_function("alpha_kernel/n=100", |b| {
        let k = AlphaKernel::new(y.values(), 1.0, &hyper);
        b.iter(|| k.log_density(black_box(0.8)))
    });
    c.bench_function("lambda_kernel/n=100", |b| {
        let k = LambdaKernel::new(y.values(), 0.85, &hyper);
        b.iter(|| k.log_density(black_box(1.2)))
    });
    let params = InarParams::new(0.85, 1.0).unwrap();
    let mut config = LatentConfig::clean(y.len(), 0.05);
    config.delta[74] = true;
    config.eta[74] = 15;
    c.bench_function("delta_probability", |b| {
        b.iter(|| delta_probability(y.values(), &params, &config, black_box(74)))
    });
    c.bench_function("eta_conditional_pmf", |b| {
        b.iter(|| eta_conditional_pmf(y.values(), &params, &config, black_box(74), 30.0))
    });
}

fn arms(c: &mut Criterion) {
    let y = series(100);
    let hyper = Hyperparams::default();
    let kernel = AlphaKernel::new(y.values(), 1.0, &hyper);
    let domain = Domain::unit();
    let init = domain.default_abscissae();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    c.bench_function("arms_draw/alpha", |b| {
        b.iter(|| arms_draw(|a| kernel.log_density(a), domain, &init, 0.8, &mut rng).unwrap())
    });
}

fn chain(c: &mut Criterion) {
    let y = series(100);
    let mut group = c.benchmark_group("run_chain");
    group.sample_size(10);
    let cfg = GibbsConfig {
        burn_in: 100,
        iterations: 100,
        ..GibbsConfig::default()
    };
    group.bench_function("n=100/200 sweeps", |b| {
        b.iter(|| run_chain(&y, &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, transition, kernels, arms, chain);
criterion_main!(benches);
