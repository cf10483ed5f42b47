//! Matching the prior variability of `alpha(u_i, u_j)` across models.

use symlatent::model::{calibrate_prior_alpha_variance, prior_alpha_variance, ModelKind, PriorConfig};
use symlatent::stats::RngStream;

fn main() -> symlatent::Result<()> {
    let n = 100;
    let base = PriorConfig::default();
    for kind in ModelKind::ALL {
        for k in [1, 3, 10] {
            let mut rng = RngStream::new(3);
            let before = prior_alpha_variance(kind, k, n, &base, 20_000, &mut rng)?;
            let calibrated = calibrate_prior_alpha_variance(kind, k, n, &base, 1.0)?;
            let after = prior_alpha_variance(kind, k, n, &calibrated, 20_000, &mut rng)?;
            println!("{kind:>5} K={k:<2} Var[alpha]: default {before:>10.3}  calibrated {after:.3}");
        }
    }
    Ok(())
}
