//! Joint-distribution check of the sampler for every model.
//!
//! Usage: `cargo run --release --example sampler_check [rounds] [levels]`

use symlatent::mcmc::{joint_distribution_check, CheckConfig};
use symlatent::model::ModelKind;

fn main() -> symlatent::Result<()> {
    let mut args = std::env::args().skip(1);
    let rounds = args.next().map_or(100_000, |s| s.parse().expect("rounds"));
    let levels = args.next().map_or(2, |s| s.parse().expect("levels"));
    for kind in ModelKind::ALL {
        let config = CheckConfig {
            rounds,
            levels,
            ..CheckConfig::default()
        };
        let report = joint_distribution_check(kind, &config)?;
        println!("{report}");
    }
    let broken = CheckConfig {
        rounds: rounds.min(20_000),
        corrupt_truncation: true,
        ..CheckConfig::default()
    };
    let report = joint_distribution_check(ModelKind::Eigen, &broken)?;
    println!(
        "corrupted truncation: max |z| = {:.1} ({})",
        report.max_abs_z(),
        if report.passed() { "not detected" } else { "detected" }
    );
    Ok(())
}
