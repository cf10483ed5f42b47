//! Simulate from a known state, fit, and compare.
//!
//! 1. Eigenmodel with `lambda = (3, -3)` on 80 nodes: the fitted eigenvalues
//!    should come back with one positive and one negative sign.
//! 2. Class model with two planted blocks: the fitted partition should match.

use symlatent::data::DyadCovariates;
use symlatent::eval::{binarize, roc_from_scores};
use symlatent::mcmc::{posterior_predictive_mean, run_chain, SamplerConfig};
use symlatent::model::{calibrate_prior_alpha_variance, EigenState, LatentState, ModelKind, PriorConfig};
use symlatent::simulate::{adjusted_rand_index, planted_two_blocks, simulate, SimulationParams};
use symlatent::stats::RngStream;

fn main() -> symlatent::Result<()> {
    let n = 80;
    let mut rng = RngStream::new(21);
    let vectors = (0..2 * n).map(|_| rng.std_normal()).collect();
    let truth = EigenState::new(vectors, 2, vec![3.0, -3.0], vec![0.0, 0.0])?;
    let params = SimulationParams {
        intercept: -0.5,
        latent: Some(LatentState::Eigen(truth)),
        ..SimulationParams::default()
    };
    let sim = simulate(ModelKind::Eigen, n, 2, &params, 22)?;
    let x = DyadCovariates::none(n);
    let prior = calibrate_prior_alpha_variance(ModelKind::Eigen, 2, n, &PriorConfig::default(), 1.0)?;
    let config = SamplerConfig {
        iterations: 3_000,
        burn_in: 1_000,
        ..SamplerConfig::default()
    };
    let trace = run_chain(&sim.y, &x, ModelKind::Eigen, 2, &config, &prior)?;

    let (l1, l2) = (trace.column("lambda_1").unwrap(), trace.column("lambda_2").unwrap());
    let (mut hi, mut lo) = (0.0, 0.0);
    for (a, b) in l1.iter().zip(&l2) {
        hi += a.max(*b);
        lo += a.min(*b);
    }
    let count = l1.len() as f64;
    println!("posterior mean of sorted lambda: ({:.2}, {:.2})", hi / count, lo / count);

    let dyads: Vec<usize> = (0..sim.y.dyad_count()).collect();
    let yhat = posterior_predictive_mean(&trace, &dyads)?;
    let labels: Vec<bool> = binarize(&sim.y).into_iter().map(|t| t.unwrap_or(false)).collect();
    println!("in-sample AUC {:.3}", roc_from_scores(&yhat, &labels)?.auc);

    let blocks = planted_two_blocks(60, 3.0, -3.0)?;
    let planted = blocks.labels.clone();
    let params = SimulationParams {
        latent: Some(LatentState::Class(blocks)),
        ..SimulationParams::default()
    };
    let sim = simulate(ModelKind::Class, 60, 2, &params, 23)?;
    let prior = calibrate_prior_alpha_variance(ModelKind::Class, 2, 60, &PriorConfig::default(), 1.0)?;
    let config = SamplerConfig {
        iterations: 300,
        burn_in: 100,
        ..SamplerConfig::default()
    };
    let trace = run_chain(&sim.y, &DyadCovariates::none(60), ModelKind::Class, 2, &config, &prior)?;
    if let Some(LatentState::Class(fitted)) = trace.last_latent() {
        println!(
            "planted partition recovered with adjusted Rand index {:.3}",
            adjusted_rand_index(&planted, &fitted.labels)?
        );
    }
    Ok(())
}
