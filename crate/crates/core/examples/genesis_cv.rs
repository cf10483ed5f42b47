//! Cross-validated AUC table for the Genesis word-adjacency network.
//!
//! Usage: `cargo run --release --example genesis_cv [sweeps] [out.csv]`
//!
//! Fits all three models at K = 3, 5, 10 with five-fold cross-validation.
//! Expect a few minutes per model and K at the default 4,000 sweeps.

use symlatent::data::{tokenize_adjacency_counts, DyadCovariates};
use symlatent::eval::{auc_table, CvConfig, Dataset};
use symlatent::mcmc::SamplerConfig;
use symlatent::model::ModelKind;

fn main() -> symlatent::Result<()> {
    let mut args = std::env::args().skip(1);
    let sweeps: usize = args.next().map_or(4_000, |s| s.parse().expect("sweeps"));
    let out = args.next();

    let y = tokenize_adjacency_counts(symlatent::GENESIS_CHAPTER_1)?;
    println!(
        "{} tokens, {} dyads, count levels {:?}",
        y.n(),
        y.dyad_count(),
        y.value_levels()
    );
    let genesis = Dataset {
        name: "genesis".into(),
        x: DyadCovariates::none(y.n()),
        y,
    };
    let config = CvConfig {
        sampler: SamplerConfig {
            iterations: sweeps,
            burn_in: sweeps / 4,
            ..SamplerConfig::default()
        },
        ..CvConfig::default()
    };
    let table = auc_table(&[genesis], &ModelKind::ALL, &[3, 5, 10], &config)?;
    print!("{}", table.to_csv());
    if let Some(path) = out {
        table.write_csv(path)?;
    }
    Ok(())
}
