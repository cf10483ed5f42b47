//! Sampler behaviour on small synthetic problems.

use symlatent::data::{DyadCovariates, Sociomatrix};
use symlatent::eval::{cross_validate, CvConfig};
use symlatent::mcmc::{posterior_predictive_mean, run_chain, Chain, SamplerConfig};
use symlatent::model::*;
use symlatent::simulate::{adjusted_rand_index, numeric_labels, planted_two_blocks, simulate, SimulationParams};
use symlatent::stats::{std_normal_cdf, RngStream};

fn origin_state(n: usize) -> LatentState {
    LatentState::Distance(DistanceState::new(vec![0.0; n], 1, vec![1.0]).unwrap())
}

fn single_dyad_chain(x: &DyadCovariates, level: usize) -> Chain<'_> {
    let mut chain = Chain::with_levels(
        2,
        vec![Some(level)],
        2,
        x,
        ModelKind::Distance,
        1,
        &PriorConfig::default(),
        &SamplerConfig::default(),
        RngStream::new(5),
    )
    .unwrap();
    chain
        .set_parameters(GlobalParams::new(vec![], vec![0.0]).unwrap(), origin_state(2))
        .unwrap();
    chain
}

#[test]
fn z_given_edge_is_half_normal() {
    let x = DyadCovariates::none(2);
    let mut chain = single_dyad_chain(&x, 1);
    let n = 10_000;
    let mut sum = 0.0;
    for _ in 0..n {
        chain.sample_z();
        let z = chain.state().z[0];
        assert!(z > 0.0);
        sum += z;
    }
    let oracle = (2.0 / std::f64::consts::PI).sqrt();
    let se = (1.0 - 2.0 / std::f64::consts::PI).sqrt() / (n as f64).sqrt();
    assert!((sum / n as f64 - oracle).abs() < 4.0 * se);

    let mut chain = single_dyad_chain(&x, 0);
    for _ in 0..1000 {
        chain.sample_z();
        assert!(chain.state().z[0] < 0.0);
    }
}

fn ordinal_data(n: usize, seed: u64) -> Sociomatrix {
    let mut rng = RngStream::new(seed);
    let vals: Vec<u32> = (0..n * (n - 1) / 2)
        .map(|_| {
            let u = rng.uniform_open();
            if u < 0.6 {
                0
            } else if u < 0.85 {
                1
            } else if u < 0.95 {
                2
            } else {
                4
            }
        })
        .collect();
    Sociomatrix::new(numeric_labels(n), vals, vec![true; n * (n - 1) / 2]).unwrap()
}

#[test]
fn invariants_hold_after_every_sweep() {
    let y = ordinal_data(15, 3);
    let levels = y.level_indices();
    let x = DyadCovariates::none(15);
    for kind in ModelKind::ALL {
        let config = SamplerConfig {
            seed: 9,
            ..SamplerConfig::default()
        };
        let mut chain = Chain::new(&y, &x, kind, 2, &PriorConfig::default(), &config).unwrap();
        for _ in 0..100 {
            chain.sweep().unwrap();
            let st = chain.state();
            assert!(st.globals.thresholds.windows(2).all(|w| w[0] < w[1]));
            for (d, l) in levels.iter().enumerate() {
                let (lo, hi) = st.globals.level_bounds(l.unwrap());
                assert!(st.z[d] > lo && st.z[d] < hi, "{kind}: dyad {d}");
            }
            assert_eq!(st.latent.k(), 2);
            assert_eq!(st.latent.node_count(), 15);
        }
    }
}

#[test]
fn recorded_sample_count() {
    let y = ordinal_data(8, 4);
    let x = DyadCovariates::none(8);
    let config = SamplerConfig {
        iterations: 51,
        burn_in: 50,
        thin: 1,
        ..SamplerConfig::default()
    };
    let trace = run_chain(&y, &x, ModelKind::Class, 2, &config, &PriorConfig::default()).unwrap();
    assert_eq!(trace.len(), 1);
    let config = SamplerConfig {
        iterations: 137,
        burn_in: 20,
        thin: 7,
        ..SamplerConfig::default()
    };
    let trace = run_chain(&y, &x, ModelKind::Eigen, 2, &config, &PriorConfig::default()).unwrap();
    assert_eq!(trace.len(), config.recorded_samples());
    assert_eq!(trace.len(), (137 - 20) / 7);
}

#[test]
fn same_seed_same_trace() {
    let y = ordinal_data(12, 5);
    let x = DyadCovariates::none(12);
    let config = SamplerConfig {
        iterations: 300,
        burn_in: 100,
        ..SamplerConfig::default()
    };
    for kind in ModelKind::ALL {
        let a = run_chain(&y, &x, kind, 2, &config, &PriorConfig::default()).unwrap();
        let b = run_chain(&y, &x, kind, 2, &config, &PriorConfig::default()).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        let d: Vec<usize> = (0..y.dyad_count()).collect();
        assert_eq!(
            posterior_predictive_mean(&a, &d).unwrap(),
            posterior_predictive_mean(&b, &d).unwrap()
        );
    }
}

#[test]
fn predictive_mean_within_recorded_range() {
    let y = ordinal_data(10, 6);
    let x = DyadCovariates::none(10);
    let config = SamplerConfig {
        iterations: 400,
        burn_in: 100,
        ..SamplerConfig::default()
    };
    let trace = run_chain(&y, &x, ModelKind::Distance, 2, &config, &PriorConfig::default()).unwrap();
    for d in 0..y.dyad_count() {
        let m = trace.predictive_mean(d).unwrap();
        let (lo, hi) = trace.theta_range(d);
        assert!(lo <= m && m <= hi && (0.0..=1.0).contains(&m));
    }
}

#[test]
fn predictive_mean_agrees_with_simulated_outcomes() {
    let sim = simulate(ModelKind::Eigen, 20, 2, &SimulationParams::default(), 7).unwrap();
    let x = DyadCovariates::none(20);
    let config = SamplerConfig {
        iterations: 20_000,
        burn_in: 2_000,
        thin: 1,
        ..SamplerConfig::default()
    };
    let mut chain = Chain::new(&sim.y, &x, ModelKind::Eigen, 2, &PriorConfig::default(), &config).unwrap();
    let mut rng = RngStream::new(8);
    let d = 3;
    let (mut theta_sum, mut hits, mut count) = (0.0, 0.0, 0.0);
    for s in 1..=config.iterations {
        chain.sweep().unwrap();
        if s > config.burn_in {
            let st = chain.state();
            let eta = chain.eta(d);
            theta_sum += std_normal_cdf(eta - st.globals.thresholds[0]);
            hits += f64::from(u8::from(eta + rng.std_normal() > st.globals.thresholds[0]));
            count += 1.0;
            assert_eq!(chain.theta(d), std_normal_cdf(eta - st.globals.thresholds[0]));
        }
    }
    assert!((theta_sum / count - hits / count).abs() < 1e-2);
}

#[test]
fn beta_recovery() {
    let n = 60;
    let pairs = n * (n - 1) / 2;
    let mut rng = RngStream::new(10);
    let xs: Vec<f64> = (0..pairs).map(|_| rng.std_normal()).collect();
    let values = xs
        .iter()
        .map(|&v| u32::from(1.5 * v - 0.3 + rng.std_normal() > 0.0))
        .collect();
    let y = Sociomatrix::new(numeric_labels(n), values, vec![true; pairs]).unwrap();
    let x = DyadCovariates::new(n, 1, xs).unwrap();
    let config = SamplerConfig {
        iterations: 5_000,
        burn_in: 1_000,
        ..SamplerConfig::default()
    };
    let trace = run_chain(&y, &x, ModelKind::Eigen, 1, &config, &PriorConfig::default()).unwrap();
    let beta = trace.column("beta_1").unwrap();
    let m = beta.iter().sum::<f64>() / beta.len() as f64;
    let sd = (beta.iter().map(|b| (b - m) * (b - m)).sum::<f64>() / (beta.len() - 1) as f64).sqrt();
    assert!((m - 1.5).abs() < 3.0 * sd, "posterior mean {m}, sd {sd}");
}

#[test]
fn degenerate_beta_prior_pins_beta() {
    let n = 20;
    let pairs = n * (n - 1) / 2;
    let mut rng = RngStream::new(11);
    let xs: Vec<f64> = (0..pairs).map(|_| rng.std_normal()).collect();
    let values = xs.iter().map(|&v| u32::from(v > 0.0)).collect();
    let y = Sociomatrix::new(numeric_labels(n), values, vec![true; pairs]).unwrap();
    let x = DyadCovariates::new(n, 1, xs).unwrap();
    let prior = PriorConfig {
        beta_var: 1e-12,
        ..PriorConfig::default()
    };
    let config = SamplerConfig {
        iterations: 50,
        burn_in: 10,
        thin: 1,
        ..SamplerConfig::default()
    };
    let trace = run_chain(&y, &x, ModelKind::Class, 1, &config, &prior).unwrap();
    assert!(trace.column("beta_1").unwrap().iter().all(|b| b.abs() < 1e-4));
    let none = DyadCovariates::none(n);
    let trace = run_chain(&y, &none, ModelKind::Class, 1, &config, &prior).unwrap();
    assert!(trace.column("beta_1").is_none());
    assert!(trace.last_globals().unwrap().beta.is_empty());
}

#[test]
fn planted_blocks_recovered_quickly() {
    let blocks = planted_two_blocks(40, 3.0, -3.0).unwrap();
    let truth = blocks.labels.clone();
    let params = SimulationParams {
        latent: Some(LatentState::Class(blocks)),
        ..SimulationParams::default()
    };
    let sim = simulate(ModelKind::Class, 40, 2, &params, 12).unwrap();
    let config = SamplerConfig {
        iterations: 100,
        burn_in: 50,
        ..SamplerConfig::default()
    };
    let trace = run_chain(&sim.y, &DyadCovariates::none(40), ModelKind::Class, 2, &config, &PriorConfig::default())
        .unwrap();
    let Some(LatentState::Class(fit)) = trace.last_latent() else { panic!() };
    assert_eq!(adjusted_rand_index(&truth, &fit.labels).unwrap(), 1.0);
}

#[test]
fn single_class_keeps_labels() {
    let y = ordinal_data(10, 13);
    let config = SamplerConfig {
        iterations: 30,
        burn_in: 10,
        ..SamplerConfig::default()
    };
    let trace = run_chain(&y, &DyadCovariates::none(10), ModelKind::Class, 1, &config, &PriorConfig::default()).unwrap();
    let Some(LatentState::Class(fit)) = trace.last_latent() else { panic!() };
    assert!(fit.labels.iter().all(|&l| l == 0));
}

#[test]
fn tiny_proposals_are_almost_always_accepted() {
    let y = ordinal_data(12, 14);
    let config = SamplerConfig {
        iterations: 60,
        burn_in: 10,
        mh_step: 1e-6,
        adapt: false,
        ..SamplerConfig::default()
    };
    let trace = run_chain(&y, &DyadCovariates::none(12), ModelKind::Distance, 2, &config, &PriorConfig::default())
        .unwrap();
    assert!(trace.acceptance_rate().unwrap() > 0.99);
}

#[test]
fn adaptation_reaches_target_band() {
    let positions = symlatent::simulate::two_cluster_positions(60, 3.0, 1.0, 15).unwrap();
    let params = SimulationParams {
        intercept: 1.0,
        latent: Some(LatentState::Distance(positions)),
        ..SimulationParams::default()
    };
    let sim = simulate(ModelKind::Distance, 60, 2, &params, 16).unwrap();
    let config = SamplerConfig {
        iterations: 1_500,
        burn_in: 1_000,
        mh_step: 3.0,
        ..SamplerConfig::default()
    };
    let trace = run_chain(&sim.y, &DyadCovariates::none(60), ModelKind::Distance, 2, &config, &PriorConfig::default())
        .unwrap();
    let rate = trace.acceptance_rate().unwrap();
    assert!((0.25..=0.5).contains(&rate), "acceptance {rate}");
}

#[test]
fn hidden_values_do_not_leak() {
    let y = ordinal_data(14, 17);
    let x = DyadCovariates::none(14);
    let config = CvConfig {
        sampler: SamplerConfig {
            iterations: 200,
            burn_in: 50,
            ..SamplerConfig::default()
        },
        ..CvConfig::default()
    };
    let base = cross_validate(&y, &x, ModelKind::Eigen, 2, &config).unwrap();
    let fold1 = base.folds.members(1);
    let mut values: Vec<u32> = (0..y.dyad_count()).map(|d| y.value(d).unwrap()).collect();
    for &d in &fold1 {
        values[d] = if values[d] == 0 { 4 } else { 0 };
    }
    let changed = Sociomatrix::new(y.labels().to_vec(), values, vec![true; y.dyad_count()]).unwrap();
    let again = cross_validate(&changed, &x, ModelKind::Eigen, 2, &config).unwrap();
    assert_eq!(again.folds, base.folds);
    for d in fold1 {
        assert_eq!(again.yhat[d], base.yhat[d]);
    }
}
