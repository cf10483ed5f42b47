//! A homophilous network: two loose clusters of positions in the plane.
//!
//! The distance model generated the data, so it should predict held-out
//! dyads at least as well as the eigenmodel and clearly better than the
//! class model, which can only see the two clusters and not the distances
//! within them.

use symlatent::data::DyadCovariates;
use symlatent::eval::{cross_validate, roc_curve, CvConfig};
use symlatent::mcmc::SamplerConfig;
use symlatent::model::{LatentState, ModelKind};
use symlatent::simulate::{clustering_coefficient, density, simulate, two_cluster_positions, SimulationParams};

fn main() -> symlatent::Result<()> {
    let n = 200;
    let positions = two_cluster_positions(n, 3.0, 1.0, 31)?;
    let params = SimulationParams {
        intercept: 1.0,
        latent: Some(LatentState::Distance(positions)),
        ..SimulationParams::default()
    };
    let sim = simulate(ModelKind::Distance, n, 2, &params, 32)?;
    println!(
        "density {:.3}, clustering coefficient {:.3}",
        density(&sim.y),
        clustering_coefficient(&sim.y)
    );

    let x = DyadCovariates::none(n);
    let config = CvConfig {
        sampler: SamplerConfig {
            iterations: 4_000,
            burn_in: 1_000,
            ..SamplerConfig::default()
        },
        ..CvConfig::default()
    };
    for kind in ModelKind::ALL {
        let pred = cross_validate(&sim.y, &x, kind, 3, &config)?;
        println!("{kind:>5} K=3: AUC {:.3}", roc_curve(&pred)?.auc);
    }
    Ok(())
}
