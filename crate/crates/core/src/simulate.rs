//! Forward simulation of binary sociomatrices from each model.

use crate::data::{DyadIndex, Sociomatrix};
use crate::error::{Error, Result};
use crate::model::{
    sample_latent_prior, ClassState, DistanceState, Kernel, LatentState, ModelKind, PriorConfig,
};
use crate::stats::{std_normal_cdf, RngStream};

/// Parameters of a forward simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationParams {
    /// `mu` in `P(y = 1) = Phi(mu + alpha)`.
    pub intercept: f64,
    /// Fixed latent state; drawn from `prior` when `None`.
    pub latent: Option<LatentState>,
    pub prior: PriorConfig,
}

impl Default for SimulationParams {
    fn default() -> Self {
        SimulationParams {
            intercept: 0.0,
            latent: None,
            prior: PriorConfig::default(),
        }
    }
}

/// A simulated network with the state that generated it.
#[derive(Clone, Debug)]
pub struct Simulation {
    pub y: Sociomatrix,
    pub latent: LatentState,
    /// `P(y_ij = 1)` per dyad.
    pub theta: Vec<f64>,
}

/// Node labels `1..=n`.
pub fn numeric_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

/// Draws a binary sociomatrix with `P(y_ij = 1) = Phi(intercept + alpha_ij)`.
pub fn simulate(kind: ModelKind, n: usize, k: usize, params: &SimulationParams, seed: u64) -> Result<Simulation> {
    if n < 2 {
        return Err(Error::invalid("need at least two nodes"));
    }
    if !params.intercept.is_finite() {
        return Err(Error::invalid("intercept must be finite"));
    }
    let mut rng = RngStream::new(seed);
    let latent = match &params.latent {
        Some(l) => {
            if l.kind() != kind || l.node_count() != n || l.k() != k {
                return Err(Error::invalid("supplied latent state does not match kind, n and K"));
            }
            l.clone()
        }
        None => {
            params.prior.validate()?;
            sample_latent_prior(kind, n, k, &params.prior, &mut rng)?
        }
    };
    let pairs = DyadIndex::new(n).pairs();
    let theta: Vec<f64> = pairs
        .iter()
        .map(|&(i, j)| std_normal_cdf(params.intercept + latent.alpha(i, j)))
        .collect();
    let values = theta.iter().map(|&t| u32::from(rng.uniform_open() < t)).collect();
    let y = Sociomatrix::new(numeric_labels(n), values, vec![true; pairs.len()])?;
    Ok(Simulation { y, latent, theta })
}

/// Two tight clusters in the plane: the first `n / 2` nodes around
/// `(-separation / 2, 0)`, the rest around `(separation / 2, 0)`.
pub fn two_cluster_positions(n: usize, separation: f64, spread: f64, seed: u64) -> Result<DistanceState> {
    if !(spread >= 0.0 && separation.is_finite()) {
        return Err(Error::invalid("spread must be nonnegative and separation finite"));
    }
    let mut rng = RngStream::new(seed);
    let mut positions = Vec::with_capacity(2 * n);
    for i in 0..n {
        let cx = if i < n / 2 { -separation / 2.0 } else { separation / 2.0 };
        positions.push(cx + spread * rng.std_normal());
        positions.push(spread * rng.std_normal());
    }
    let var = (separation * separation / 4.0 + spread * spread).max(f64::MIN_POSITIVE);
    DistanceState::new(positions, 2, vec![var, spread * spread + f64::MIN_POSITIVE])
}

/// Class state with the first `n / 2` nodes in class 0 and the rest in class 1.
pub fn planted_two_blocks(n: usize, within: f64, across: f64) -> Result<ClassState> {
    let labels = (0..n).map(|i| usize::from(i >= n / 2)).collect();
    ClassState::new(labels, 2, vec![within, across, across, within], within.abs().max(across.abs()).powi(2))
}

/// Edge density of the observed dyads (binary data).
pub fn density(y: &Sociomatrix) -> f64 {
    let obs = y.observed_dyads();
    obs.iter().filter(|&&d| y.value(d).unwrap_or(0) > 0).count() as f64 / obs.len().max(1) as f64
}

/// Global clustering coefficient: closed over connected triples.
pub fn clustering_coefficient(y: &Sociomatrix) -> f64 {
    let n = y.n();
    let idx = y.dyad_index();
    let edge = |i: usize, j: usize| y.value(idx.index_unchecked(i, j)).unwrap_or(0) > 0;
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if edge(i, j) {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let (mut closed, mut triples) = (0u64, 0u64);
    for nb in &adj {
        for a in 0..nb.len() {
            for b in (a + 1)..nb.len() {
                triples += 1;
                if edge(nb[a], nb[b]) {
                    closed += 1;
                }
            }
        }
    }
    if triples == 0 {
        0.0
    } else {
        closed as f64 / triples as f64
    }
}

/// Adjusted Rand index between two partitions.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch("partitions differ in length".into()));
    }
    let ka = a.iter().max().map_or(0, |m| m + 1);
    let kb = b.iter().max().map_or(0, |m| m + 1);
    let mut table = vec![vec![0u64; kb]; ka];
    for (&x, &y) in a.iter().zip(b) {
        table[x][y] += 1;
    }
    let c2 = |v: u64| (v * v.saturating_sub(1)) as f64 / 2.0;
    let index: f64 = table.iter().flatten().map(|&v| c2(v)).sum();
    let rows: f64 = table.iter().map(|r| c2(r.iter().sum())).sum();
    let cols: f64 = (0..kb).map(|j| c2(table.iter().map(|r| r[j]).sum())).sum();
    let total = c2(a.len() as u64);
    let expected = rows * cols / total;
    let max = (rows + cols) / 2.0;
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}
