//! Posterior simulation by Gibbs sampling with latent Gaussian augmentation.
//!
//! One sweep updates, in order:
//!
//! 1. every `z_ij` from its truncated normal full conditional (unobserved
//!    dyads are imputed from the untruncated normal);
//! 2. each finite threshold from its normal prior restricted to the gap left
//!    by the neighbouring levels' `z` values;
//! 3. `beta` from its multivariate normal full conditional;
//! 4. the latent configuration and its hyperparameters, model by model.

mod check;
mod class;
mod distance;
mod eigen;
mod trace;

use nalgebra::{DMatrix, DVector};

use crate::data::{DyadCovariates, DyadIndex, Sociomatrix};
use crate::error::{Error, Result};
use crate::model::{
    dot, prob_above_lowest, sample_latent_prior, GlobalParams, Kernel, LatentState, ModelKind,
    PriorConfig,
};
use crate::stats::{
    mvn_draw_canonical, std_normal_quantile, truncated_normal_draw, truncated_normal_scaled,
    RngStream,
};

pub use check::{joint_distribution_check, CheckConfig, CheckReport, CheckStatistic};
pub use trace::{posterior_predictive_mean, Trace};

/// Acceptance rate the distance-model proposal is tuned towards during burn-in.
pub const TARGET_ACCEPTANCE: f64 = 0.35;

#[derive(Clone, Debug, PartialEq)]
pub struct SamplerConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    /// Standard deviation of the random-walk proposal for distance-model positions.
    pub mh_step: f64,
    /// Tune `mh_step` during burn-in; frozen afterwards.
    pub adapt: bool,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            iterations: 10_000,
            burn_in: 2_500,
            thin: 10,
            mh_step: 0.5,
            adapt: true,
            seed: 1,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.burn_in >= self.iterations {
            return Err(Error::invalid("burn-in must be shorter than the run"));
        }
        if self.thin == 0 {
            return Err(Error::invalid("thin must be at least 1"));
        }
        if !(self.mh_step > 0.0 && self.mh_step.is_finite()) {
            return Err(Error::invalid("mh_step must be positive"));
        }
        Ok(())
    }

    /// Number of samples a full run records.
    pub fn recorded_samples(&self) -> usize {
        (self.iterations - self.burn_in) / self.thin
    }
}

/// Full sampler state.
#[derive(Clone, Debug)]
pub struct ChainState {
    /// Latent Gaussian per dyad, upper-triangle order.
    pub z: Vec<f64>,
    pub globals: GlobalParams,
    /// Latent configuration including its hyperparameters.
    pub latent: LatentState,
    pub rng: RngStream,
}

/// A Markov chain bound to one dataset.
#[derive(Clone, Debug)]
pub struct Chain<'a> {
    x: &'a DyadCovariates,
    index: DyadIndex,
    pairs: Vec<(usize, usize)>,
    levels: Vec<Option<usize>>,
    level_count: usize,
    prior: PriorConfig,
    config: SamplerConfig,
    state: ChainState,
    /// Cached `betaᵀx` per dyad.
    xb: Vec<f64>,
    mh_step: f64,
    sweeps: usize,
    sweep_accepted: usize,
    sweep_proposed: usize,
    corrupt_truncation: bool,
}

impl<'a> Chain<'a> {
    /// Chain on the observed levels of `y`, initialized as described on [`run_chain`].
    pub fn new(
        y: &Sociomatrix,
        x: &'a DyadCovariates,
        kind: ModelKind,
        k: usize,
        prior: &PriorConfig,
        config: &SamplerConfig,
    ) -> Result<Self> {
        let level_count = y.value_levels().len();
        let rng = RngStream::new(config.seed);
        Chain::with_levels(y.n(), y.level_indices(), level_count, x, kind, k, prior, config, rng)
    }

    /// Chain over an explicit level table: `levels[d]` is the level index of
    /// dyad `d` (or `None` when unobserved) in a sample space of `level_count`.
    #[allow(clippy::too_many_arguments)]
    pub fn with_levels(
        n: usize,
        levels: Vec<Option<usize>>,
        level_count: usize,
        x: &'a DyadCovariates,
        kind: ModelKind,
        k: usize,
        prior: &PriorConfig,
        config: &SamplerConfig,
        mut rng: RngStream,
    ) -> Result<Self> {
        config.validate()?;
        prior.validate()?;
        let index = DyadIndex::new(n);
        if levels.len() != index.len() {
            return Err(Error::DimensionMismatch("level table size".into()));
        }
        if x.n() != n {
            return Err(Error::DimensionMismatch(format!(
                "covariates are for {} nodes, data has {n}",
                x.n()
            )));
        }
        if level_count < 2 {
            return Err(Error::invalid("data need at least two distinct observed values"));
        }
        if levels.iter().flatten().any(|&l| l >= level_count) {
            return Err(Error::invalid("level index outside the sample space"));
        }
        if n < 2 {
            return Err(Error::invalid("need at least two nodes"));
        }
        let thresholds = initial_thresholds(&levels, level_count);
        let globals = GlobalParams::new(vec![0.0; x.p()], thresholds)?;
        let latent = sample_latent_prior(kind, n, k, prior, &mut rng)?;
        let state = ChainState {
            z: vec![0.0; index.len()],
            globals,
            latent,
            rng,
        };
        let mut chain = Chain {
            x,
            index,
            pairs: index.pairs(),
            levels,
            level_count,
            prior: prior.clone(),
            config: config.clone(),
            state,
            xb: vec![0.0; index.len()],
            mh_step: config.mh_step,
            sweeps: 0,
            sweep_accepted: 0,
            sweep_proposed: 0,
            corrupt_truncation: false,
        };
        chain.sample_z();
        Ok(chain)
    }

    pub fn state(&self) -> &ChainState {
        &self.state
    }

    pub fn n(&self) -> usize {
        self.index.n()
    }

    pub fn kind(&self) -> ModelKind {
        self.state.latent.kind()
    }

    pub fn sweeps_done(&self) -> usize {
        self.sweeps
    }

    pub fn mh_step(&self) -> f64 {
        self.mh_step
    }

    /// Acceptance rate of the distance-model proposals in the last sweep.
    pub fn last_acceptance(&self) -> Option<f64> {
        (self.sweep_proposed > 0).then(|| self.sweep_accepted as f64 / self.sweep_proposed as f64)
    }

    pub fn level_count(&self) -> usize {
        self.level_count
    }

    pub fn prior(&self) -> &PriorConfig {
        &self.prior
    }

    /// Replaces parameters and latent configuration, then redraws `Z`.
    pub fn set_parameters(&mut self, globals: GlobalParams, latent: LatentState) -> Result<()> {
        globals.validate()?;
        if globals.level_count() != self.level_count || globals.beta.len() != self.x.p() {
            return Err(Error::DimensionMismatch("parameters do not fit this chain".into()));
        }
        if latent.node_count() != self.n() {
            return Err(Error::DimensionMismatch("latent state has wrong node count".into()));
        }
        self.state.globals = globals;
        self.state.latent = latent;
        self.refresh_xb();
        self.sample_z();
        Ok(())
    }

    pub(crate) fn set_levels(&mut self, levels: Vec<Option<usize>>) {
        debug_assert_eq!(levels.len(), self.levels.len());
        self.levels = levels;
    }

    pub(crate) fn set_z(&mut self, z: Vec<f64>) {
        self.state.z = z;
    }

    pub(crate) fn rng(&mut self) -> &mut RngStream {
        &mut self.state.rng
    }

    /// Test hook: draw observed `z` from the mirrored level's interval.
    #[doc(hidden)]
    pub fn corrupt_truncation(&mut self, on: bool) {
        self.corrupt_truncation = on;
    }

    #[inline]
    pub fn alpha(&self, d: usize) -> f64 {
        let (i, j) = self.pairs[d];
        self.state.latent.alpha(i, j)
    }

    #[inline]
    pub fn eta(&self, d: usize) -> f64 {
        self.xb[d] + self.alpha(d)
    }

    /// `P(y_d above the lowest level)` under the current state.
    pub fn theta(&self, d: usize) -> f64 {
        prob_above_lowest(&self.state.globals, self.eta(d))
    }

    pub fn dyad_count(&self) -> usize {
        self.pairs.len()
    }

    /// One full sweep of all update blocks.
    pub fn sweep(&mut self) -> Result<()> {
        self.sample_z();
        self.sample_thresholds()?;
        self.sample_beta()?;
        self.update_latent()?;
        self.sweeps += 1;
        Ok(())
    }

    /// Step 1: latent Gaussians given everything else.
    pub fn sample_z(&mut self) {
        let m = self.level_count;
        for d in 0..self.pairs.len() {
            let eta = self.eta(d);
            let z = match self.levels[d] {
                Some(l) => {
                    let l = if self.corrupt_truncation { m - 1 - l } else { l };
                    let (lo, hi) = self.state.globals.level_bounds(l);
                    truncated_normal_draw(eta, lo, hi, &mut self.state.rng)
                        .expect("threshold intervals are non-empty")
                }
                None => eta + self.state.rng.std_normal(),
            };
            self.state.z[d] = z;
        }
    }

    /// Step 2: thresholds, lowest first, each from its prior restricted to the
    /// gap between the adjacent levels' latent values.
    pub fn sample_thresholds(&mut self) -> Result<()> {
        let m = self.level_count;
        let mut max_z = vec![f64::NEG_INFINITY; m];
        let mut min_z = vec![f64::INFINITY; m];
        for (d, l) in self.levels.iter().enumerate() {
            if let Some(l) = *l {
                let z = self.state.z[d];
                max_z[l] = max_z[l].max(z);
                min_z[l] = min_z[l].min(z);
            }
        }
        let sd = self.prior.threshold_var.sqrt();
        for l in 1..m {
            let t = &self.state.globals.thresholds;
            let below = if l >= 2 { t[l - 2] } else { f64::NEG_INFINITY };
            let above = t.get(l).copied().unwrap_or(f64::INFINITY);
            let lo = below.max(max_z[l - 1]);
            let hi = above.min(min_z[l]);
            if !(lo < hi) {
                if self.corrupt_truncation {
                    continue;
                }
                return Err(Error::EmptyInterval { lo, hi });
            }
            let draw = truncated_normal_scaled(0.0, sd, lo, hi, &mut self.state.rng)?;
            self.state.globals.thresholds[l - 1] = draw;
        }
        Ok(())
    }

    /// Step 3: regression coefficients. No-op without covariates.
    pub fn sample_beta(&mut self) -> Result<()> {
        let p = self.x.p();
        if p == 0 {
            return Ok(());
        }
        let mut precision = DMatrix::<f64>::identity(p, p) / self.prior.beta_var;
        let mut linear = DVector::<f64>::zeros(p);
        for d in 0..self.pairs.len() {
            let row = self.x.row(d);
            let r = self.state.z[d] - self.alpha(d);
            for a in 0..p {
                linear[a] += row[a] * r;
                for b in 0..p {
                    precision[(a, b)] += row[a] * row[b];
                }
            }
        }
        let beta = mvn_draw_canonical(&precision, &linear, &mut self.state.rng)?;
        self.state.globals.beta = beta.iter().copied().collect();
        self.refresh_xb();
        Ok(())
    }

    fn refresh_xb(&mut self) {
        if self.x.p() == 0 {
            return;
        }
        for d in 0..self.pairs.len() {
            self.xb[d] = dot(&self.state.globals.beta, self.x.row(d));
        }
    }

    /// Step 4: latent configuration and its hyperparameters.
    pub fn update_latent(&mut self) -> Result<()> {
        match self.state.latent.kind() {
            ModelKind::Class => self.update_u_class(),
            ModelKind::Distance => self.update_u_distance(),
            ModelKind::Eigen => self.update_u_eigen(),
        }
    }

    /// Residual `z_ij - betaᵀx_ij`, the part the latent kernel has to explain.
    #[inline]
    fn residual(&self, d: usize) -> f64 {
        self.state.z[d] - self.xb[d]
    }

    fn adapting(&self) -> bool {
        self.config.adapt && self.sweeps < self.config.burn_in
    }
}

/// Cut points at standard normal quantiles of the cumulative level
/// frequencies (half-count smoothing keeps them finite and strictly ordered).
fn initial_thresholds(levels: &[Option<usize>], level_count: usize) -> Vec<f64> {
    let mut counts = vec![0.5; level_count];
    for l in levels.iter().flatten() {
        counts[*l] += 1.0;
    }
    let total: f64 = counts.iter().sum();
    let mut cum = 0.0;
    let mut out = Vec::with_capacity(level_count - 1);
    for c in &counts[..level_count - 1] {
        cum += c;
        out.push(std_normal_quantile(cum / total));
    }
    out
}

/// Runs a chain for `config.iterations` sweeps and records every `thin`-th
/// state after burn-in.
///
/// Initialization: thresholds at normal quantiles of the empirical level
/// frequencies, `beta = 0`, latent state drawn from the prior. The result is a
/// deterministic function of the inputs and `config.seed`.
pub fn run_chain(
    y: &Sociomatrix,
    x: &DyadCovariates,
    kind: ModelKind,
    k: usize,
    config: &SamplerConfig,
    prior: &PriorConfig,
) -> Result<Trace> {
    let mut chain = Chain::new(y, x, kind, k, prior, config)?;
    run_prepared(&mut chain, config)
}

/// As [`run_chain`] but with an explicit random stream (used for per-fold substreams).
pub fn run_chain_with_rng(
    y: &Sociomatrix,
    x: &DyadCovariates,
    kind: ModelKind,
    k: usize,
    config: &SamplerConfig,
    prior: &PriorConfig,
    rng: RngStream,
) -> Result<Trace> {
    let level_count = y.value_levels().len();
    let mut chain = Chain::with_levels(
        y.n(),
        y.level_indices(),
        level_count,
        x,
        kind,
        k,
        prior,
        config,
        rng,
    )?;
    run_prepared(&mut chain, config)
}

fn run_prepared(chain: &mut Chain<'_>, config: &SamplerConfig) -> Result<Trace> {
    let mut trace = Trace::new(chain);
    for s in 1..=config.iterations {
        chain.sweep()?;
        if s > config.burn_in {
            trace.note_acceptance(chain);
            if (s - config.burn_in) % config.thin == 0 {
                trace.record(chain);
            }
        }
    }
    trace.finish(chain);
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary_pair() -> Sociomatrix {
        Sociomatrix::new(vec!["a".into(), "b".into(), "c".into()], vec![1, 0, 1], vec![true; 3])
            .unwrap()
    }

    #[test]
    fn config_validation() {
        let mut c = SamplerConfig::default();
        assert!(c.validate().is_ok());
        c.burn_in = c.iterations;
        assert!(c.validate().is_err());
        let c = SamplerConfig { thin: 0, ..Default::default() };
        assert!(c.validate().is_err());
        let c = SamplerConfig { mh_step: 0.0, ..Default::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn initial_thresholds_are_ordered() {
        let levels = vec![Some(0), Some(0), Some(2), None, Some(2)];
        let t = initial_thresholds(&levels, 4);
        assert_eq!(t.len(), 3);
        assert!(t.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn z_respects_binary_constraints() {
        let y = binary_pair();
        let x = DyadCovariates::none(3);
        for kind in ModelKind::ALL {
            let cfg = SamplerConfig { iterations: 50, burn_in: 10, thin: 1, ..Default::default() };
            let mut chain = Chain::new(&y, &x, kind, 2, &PriorConfig::default(), &cfg).unwrap();
            for _ in 0..50 {
                chain.sweep().unwrap();
                let t = chain.state().globals.thresholds[0];
                let z = &chain.state().z;
                assert!(z[0] > t && z[2] > t && z[1] < t);
            }
        }
    }

    #[test]
    fn rejects_single_level_data() {
        let y = Sociomatrix::from_fn(vec!["a".into(), "b".into()], |_, _| 0).unwrap();
        let x = DyadCovariates::none(2);
        let r = Chain::new(&y, &x, ModelKind::Eigen, 1, &PriorConfig::default(), &SamplerConfig::default());
        assert!(r.is_err());
    }
}
