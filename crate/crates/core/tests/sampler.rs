use inarao_core::{
    arms_draw, cls_fit, contaminate, run_chain, simulate, summarize, Contamination, CountSeries,
    Domain, GibbsConfig, GibbsSampler, InarParams, Initialization, Outlier, SiteUpdate,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn clean(seed: u64, alpha: f64, lambda: f64, n: usize) -> CountSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    simulate(
        &InarParams::new(alpha, lambda).unwrap(),
        n,
        Initialization::Stationary,
        &mut rng,
    )
    .unwrap()
}

#[test]
fn posterior_concentrates_on_long_clean_series() {
    for (seed, alpha) in [(31, 0.5), (32, 0.85)] {
        let y = clean(seed, alpha, 1.0, 1000);
        let cfg = GibbsConfig {
            burn_in: 1000,
            iterations: 1000,
            seed,
            ..GibbsConfig::default()
        };
        let r = summarize(&run_chain(&y, &cfg).unwrap(), 0.5).unwrap();
        assert!(
            (r.alpha_hat - alpha).abs() < 0.1,
            "α={alpha}: {}",
            r.alpha_hat
        );
        assert!(
            (r.lambda_hat - 1.0).abs() < 0.15,
            "α={alpha}: λ̂={}",
            r.lambda_hat
        );
    }
}

#[test]
fn large_outlier_detection_is_stable_across_seeds() {
    // 18 is about seven stationary standard deviations at α = 0.85, λ = 1.
    let x = clean(40, 0.85, 1.0, 100);
    let y = contaminate(
        &x,
        &Contamination::new(vec![Outlier { time: 50, size: 18 }]).unwrap(),
    )
    .unwrap();
    let hits = (0..20)
        .filter(|&seed| {
            let r = summarize(
                &run_chain(
                    &y,
                    &GibbsConfig {
                        seed,
                        ..GibbsConfig::default()
                    },
                )
                .unwrap(),
                0.5,
            )
            .unwrap();
            r.flagged_times().contains(&50)
        })
        .count();
    assert!(hits >= 16, "flagged in {hits}/20 seeds");
}

#[test]
fn every_sweep_keeps_the_latent_series_feasible() {
    let mut y = clean(41, 0.5, 2.0, 80).into_vec();
    y[10] += 12;
    y[11] += 9;
    y[60] += 20;
    let y = CountSeries::new(y).unwrap();
    let cls = cls_fit(&y).unwrap();
    for site_update in [SiteUpdate::SingleSite, SiteUpdate::Blocked] {
        let cfg = GibbsConfig {
            seed: 5,
            site_update,
            ..GibbsConfig::default()
        };
        let mut sampler = GibbsSampler::new(&y, &cfg, &cls, 8.0).unwrap();
        for _ in 0..300 {
            sampler.sweep().unwrap();
            let state = sampler.state();
            let latent = state.latent.latent_series(y.values()).expect("feasible");
            assert_eq!(latent, sampler.latent_series());
            assert!(!state.latent.delta[0]);
            let (a, l) = (state.params.alpha(), state.params.lambda());
            assert!(a > 0.0 && a < 1.0 && l > 0.0);
        }
    }
}

#[test]
fn arms_handles_a_bimodal_target() {
    // Equal mixture of N(-2, 0.5²) and N(2, 0.5²): far from log-concave.
    let log_k = |x: f64| {
        let a = -(x + 2.0).powi(2) / 0.5;
        let b = -(x - 2.0).powi(2) / 0.5;
        a.max(b) + (-(a - b).abs()).exp().ln_1p()
    };
    let domain = Domain::new(-5.0, 5.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut x = 0.0;
    let n = 50_000;
    let (mut sum, mut sq, mut right) = (0.0, 0.0, 0usize);
    for _ in 0..n {
        x = arms_draw(log_k, domain, &domain.default_abscissae(), x, &mut rng)
            .unwrap()
            .value;
        assert!(domain.contains(x));
        sum += x;
        sq += x * x;
        right += (x > 0.0) as usize;
    }
    let mean = sum / n as f64;
    let second = sq / n as f64;
    assert!(mean.abs() < 0.05, "mean {mean}");
    assert!((second - 4.25).abs() < 0.05, "E[x²] {second}");
    assert!((right as f64 / n as f64 - 0.5).abs() < 0.015);
}
