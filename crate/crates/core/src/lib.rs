//! Latent variable models for symmetric relational data.
//!
//! Three kernels describe how a pair of nodes relates through their latent
//! characteristics: the latent class model (stochastic equivalence), the
//! latent distance model (homophily) and the eigenmodel, which generalizes
//! both. Each is fit under an ordered-probit likelihood by Gibbs/Metropolis
//! sampling with a latent Gaussian augmentation, and compared by
//! cross-validated link prediction.
//!
//! Module map:
//!
//! - [`data`]: sociomatrices, loaders, the word-adjacency tokenizer, folds.
//! - [`stats`]: normal CDF/quantile, truncated normal, MVN and inverse-gamma draws.
//! - [`model`]: kernels, linear predictor, probit likelihoods, priors.
//! - [`mcmc`]: the sampler, traces and the joint-distribution check.
//! - [`theory`]: numerical checks of which models can represent which.
//! - [`eval`]: cross-validation, ROC/AUC and the AUC table.
//! - [`simulate`]: forward simulation from each model.
//! - [`cli`]: the `symlatent` command line.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod mcmc;
pub mod model;
pub mod simulate;
pub mod stats;
pub mod theory;

pub use error::{Error, Result};

/// Chapter 1 of Genesis (King James Version), one verse per line.
pub const GENESIS_CHAPTER_1: &str = include_str!("../data/genesis1.txt");
