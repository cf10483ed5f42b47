//! Fit one model and summarize its trace.
//!
//! Usage: `cargo run --release --example fit_trace [dist|class|eigen] [K]`

use symlatent::data::{tokenize_adjacency_counts, DyadCovariates};
use symlatent::mcmc::{run_chain, SamplerConfig};
use symlatent::model::{calibrate_prior_alpha_variance, ModelKind, PriorConfig};

fn main() -> symlatent::Result<()> {
    let mut args = std::env::args().skip(1);
    let kind: ModelKind = args.next().as_deref().unwrap_or("dist").parse()?;
    let k: usize = args.next().map_or(2, |s| s.parse().expect("K"));

    let y = tokenize_adjacency_counts(symlatent::GENESIS_CHAPTER_1)?;
    let x = DyadCovariates::none(y.n());
    let prior = calibrate_prior_alpha_variance(kind, k, y.n(), &PriorConfig::default(), 1.0)?;
    let config = SamplerConfig {
        iterations: 2_000,
        burn_in: 500,
        ..SamplerConfig::default()
    };
    let trace = run_chain(&y, &x, kind, k, &config, &prior)?;
    println!("{} samples of {} columns", trace.len(), trace.columns().len());
    for name in trace.columns().iter().skip(1).filter(|c| !c.starts_with("threshold_") || c.as_str() == "threshold_1") {
        let col = trace.column(name).unwrap();
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        println!("{name:>14}: posterior mean {mean:.3}");
    }
    if let Some(rate) = trace.acceptance_rate() {
        println!("position acceptance {rate:.2} at step {:.3}", trace.mh_step());
    }
    Ok(())
}
