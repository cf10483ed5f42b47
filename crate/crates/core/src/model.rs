//! Kernels, linear predictor and (ordered) probit likelihoods.
//!
//! Every model writes the systematic part of a dyad as
//! `eta = betaᵀx_ij + alpha(u_i, u_j)` and links it to the ordinal outcome
//! through a latent `z ~ normal(eta, 1)`: the outcome is level `l` when
//! `t_l < z < t_{l+1}`, with `t_0 = -inf` and `t_m = +inf`.

use std::fmt;
use std::str::FromStr;

use crate::data::DyadCovariates;
use crate::error::{Error, Result};
use crate::stats::{inverse_gamma_draw, std_normal_cdf, std_normal_sf, RngStream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Distance,
    Class,
    Eigen,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Distance, ModelKind::Class, ModelKind::Eigen];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Distance => "dist",
            ModelKind::Class => "class",
            ModelKind::Eigen => "eigen",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dist" | "distance" => Ok(ModelKind::Distance),
            "class" => Ok(ModelKind::Class),
            "eigen" => Ok(ModelKind::Eigen),
            other => Err(Error::invalid(format!("unknown model `{other}`"))),
        }
    }
}

/// Regression coefficients and the finite cut points of the ordinal scale.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalParams {
    pub beta: Vec<f64>,
    /// `thresholds[l - 1]` is the lower cut of level `l`, for `l = 1..m`.
    pub thresholds: Vec<f64>,
}

impl GlobalParams {
    pub fn new(beta: Vec<f64>, thresholds: Vec<f64>) -> Result<Self> {
        let g = GlobalParams { beta, thresholds };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.thresholds.iter().any(|t| !t.is_finite())
            || self.thresholds.windows(2).any(|w| !(w[0] < w[1]))
        {
            return Err(Error::UnorderedThresholds);
        }
        Ok(())
    }

    pub fn level_count(&self) -> usize {
        self.thresholds.len() + 1
    }

    /// Open interval of the latent `z` that produces level `l`.
    #[inline]
    pub fn level_bounds(&self, l: usize) -> (f64, f64) {
        let lo = if l == 0 {
            f64::NEG_INFINITY
        } else {
            self.thresholds[l - 1]
        };
        let hi = self.thresholds.get(l).copied().unwrap_or(f64::INFINITY);
        (lo, hi)
    }

    /// Level whose interval contains `z`.
    pub fn level_of(&self, z: f64) -> usize {
        self.thresholds.partition_point(|&t| t < z)
    }
}

/// Symmetric pair kernel `alpha(u_i, u_j)`.
pub trait Kernel {
    fn node_count(&self) -> usize;

    /// Kernel value for `i != j`; callers guarantee valid indices.
    fn alpha(&self, i: usize, j: usize) -> f64;

    fn try_alpha(&self, i: usize, j: usize) -> Result<f64> {
        let n = self.node_count();
        for &idx in &[i, j] {
            if idx >= n {
                return Err(Error::IndexOutOfRange { index: idx, n });
            }
        }
        if i == j {
            return Err(Error::Diagonal(i));
        }
        Ok(self.alpha(i, j))
    }
}

/// Latent class model: `alpha = M[c_i, c_j]`. Labels are zero-based.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassState {
    pub labels: Vec<usize>,
    /// Row-major `k × k`, kept symmetric.
    pub m: Vec<f64>,
    pub k: usize,
    pub m_var: f64,
}

impl ClassState {
    pub fn new(labels: Vec<usize>, k: usize, m: Vec<f64>, m_var: f64) -> Result<Self> {
        if k == 0 || m.len() != k * k {
            return Err(Error::DimensionMismatch(format!("M must be {k}x{k}")));
        }
        if let Some(&bad) = labels.iter().find(|&&c| c >= k) {
            return Err(Error::invalid(format!("class label {bad} outside 0..{k}")));
        }
        for a in 0..k {
            for b in 0..a {
                if m[a * k + b] != m[b * k + a] {
                    return Err(Error::invalid("M must be symmetric"));
                }
            }
        }
        Ok(ClassState { labels, m, k, m_var })
    }

    #[inline]
    pub fn m_at(&self, a: usize, b: usize) -> f64 {
        self.m[a * self.k + b]
    }

    pub fn set_m(&mut self, a: usize, b: usize, v: f64) {
        self.m[a * self.k + b] = v;
        self.m[b * self.k + a] = v;
    }

    /// Renames class `c` to `perm[c]`, permuting `M` to match.
    pub fn permuted(&self, perm: &[usize]) -> ClassState {
        let k = self.k;
        let mut m = vec![0.0; k * k];
        for a in 0..k {
            for b in 0..k {
                m[perm[a] * k + perm[b]] = self.m[a * k + b];
            }
        }
        ClassState {
            labels: self.labels.iter().map(|&c| perm[c]).collect(),
            m,
            k,
            m_var: self.m_var,
        }
    }
}

impl Kernel for ClassState {
    fn node_count(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    fn alpha(&self, i: usize, j: usize) -> f64 {
        self.m_at(self.labels[i], self.labels[j])
    }
}

/// Latent distance model: `alpha = -|u_i - u_j|`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceState {
    /// Row-major `n × k`.
    pub positions: Vec<f64>,
    pub k: usize,
    /// Per-coordinate population variances.
    pub pos_var: Vec<f64>,
}

impl DistanceState {
    pub fn new(positions: Vec<f64>, k: usize, pos_var: Vec<f64>) -> Result<Self> {
        if k == 0 || positions.len() % k != 0 || pos_var.len() != k {
            return Err(Error::DimensionMismatch("positions must be n x k".into()));
        }
        if positions.iter().any(|v| !v.is_finite()) || pos_var.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::invalid("positions must be finite and variances positive"));
        }
        Ok(DistanceState { positions, k, pos_var })
    }

    #[inline]
    pub fn position(&self, i: usize) -> &[f64] {
        &self.positions[i * self.k..(i + 1) * self.k]
    }
}

#[inline]
pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

impl Kernel for DistanceState {
    fn node_count(&self) -> usize {
        self.positions.len() / self.k
    }

    #[inline]
    fn alpha(&self, i: usize, j: usize) -> f64 {
        -euclidean(self.position(i), self.position(j))
    }
}

/// Eigenmodel: `alpha = u_iᵀ diag(lambda) u_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenState {
    /// Row-major `n × k`.
    pub vectors: Vec<f64>,
    pub k: usize,
    pub lambda: Vec<f64>,
    /// Population mean of the latent vectors.
    pub vec_mean: Vec<f64>,
}

impl EigenState {
    pub fn new(vectors: Vec<f64>, k: usize, lambda: Vec<f64>, vec_mean: Vec<f64>) -> Result<Self> {
        if k == 0 || vectors.len() % k != 0 || lambda.len() != k || vec_mean.len() != k {
            return Err(Error::DimensionMismatch("vectors must be n x k".into()));
        }
        if vectors.iter().chain(&lambda).chain(&vec_mean).any(|v| !v.is_finite()) {
            return Err(Error::invalid("eigen state must be finite"));
        }
        Ok(EigenState { vectors, k, lambda, vec_mean })
    }

    #[inline]
    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.k..(i + 1) * self.k]
    }
}

impl Kernel for EigenState {
    fn node_count(&self) -> usize {
        self.vectors.len() / self.k
    }

    #[inline]
    fn alpha(&self, i: usize, j: usize) -> f64 {
        let (ui, uj) = (self.vector(i), self.vector(j));
        (0..self.k).map(|k| self.lambda[k] * (ui[k] * uj[k])).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LatentState {
    Class(ClassState),
    Distance(DistanceState),
    Eigen(EigenState),
}

impl LatentState {
    pub fn kind(&self) -> ModelKind {
        match self {
            LatentState::Class(_) => ModelKind::Class,
            LatentState::Distance(_) => ModelKind::Distance,
            LatentState::Eigen(_) => ModelKind::Eigen,
        }
    }

    pub fn k(&self) -> usize {
        match self {
            LatentState::Class(s) => s.k,
            LatentState::Distance(s) => s.k,
            LatentState::Eigen(s) => s.k,
        }
    }
}

impl Kernel for LatentState {
    fn node_count(&self) -> usize {
        match self {
            LatentState::Class(s) => s.node_count(),
            LatentState::Distance(s) => s.node_count(),
            LatentState::Eigen(s) => s.node_count(),
        }
    }

    #[inline]
    fn alpha(&self, i: usize, j: usize) -> f64 {
        match self {
            LatentState::Class(s) => s.alpha(i, j),
            LatentState::Distance(s) => s.alpha(i, j),
            LatentState::Eigen(s) => s.alpha(i, j),
        }
    }
}

pub fn alpha_class(state: &ClassState, i: usize, j: usize) -> Result<f64> {
    state.try_alpha(i, j)
}

pub fn alpha_distance(state: &DistanceState, i: usize, j: usize) -> Result<f64> {
    state.try_alpha(i, j)
}

pub fn alpha_eigen(state: &EigenState, i: usize, j: usize) -> Result<f64> {
    state.try_alpha(i, j)
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `betaᵀx_ij + alpha`.
pub fn eta(g: &GlobalParams, x: &DyadCovariates, alpha: f64, i: usize, j: usize) -> Result<f64> {
    if x.p() == 0 {
        return Ok(alpha);
    }
    if g.beta.len() != x.p() {
        return Err(Error::DimensionMismatch(format!(
            "beta has {} entries, covariates have {}",
            g.beta.len(),
            x.p()
        )));
    }
    Ok(dot(&g.beta, x.get(i, j)?) + alpha)
}

/// P(y = 1) for binary data.
///
/// The single cut point `t` plays the role of a negated intercept, so with
/// `mu = -t` this is `Phi(mu + eta)`.
pub fn binary_probit_prob(g: &GlobalParams, eta: f64) -> Result<f64> {
    if g.thresholds.len() != 1 {
        return Err(Error::invalid(format!(
            "binary likelihood needs 2 levels, model has {}",
            g.level_count()
        )));
    }
    Ok(prob_above_lowest(g, eta))
}

/// Level probabilities `Phi(t_{l+1} - eta) - Phi(t_l - eta)`.
pub fn ordered_probit_probs(g: &GlobalParams, eta: f64) -> Result<Vec<f64>> {
    g.validate()?;
    if g.thresholds.is_empty() {
        return Err(Error::invalid("ordered likelihood needs at least 2 levels"));
    }
    Ok((0..g.level_count())
        .map(|l| {
            let (lo, hi) = g.level_bounds(l);
            interval_prob(lo - eta, hi - eta)
        })
        .collect())
}

/// P(a < Z < b) for standard normal Z, evaluated on the tail that keeps precision.
pub(crate) fn interval_prob(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        std_normal_sf(a) - std_normal_sf(b)
    } else {
        std_normal_cdf(b) - std_normal_cdf(a)
    }
}

/// P(y above the lowest level) = `Phi(eta - t_1)`.
#[inline]
pub fn prob_above_lowest(g: &GlobalParams, eta: f64) -> f64 {
    match g.thresholds.first() {
        Some(t) => std_normal_sf(t - eta),
        None => 0.0,
    }
}

/// Prior hyperparameters shared by all models.
///
/// `var_shape` with `m_var_rate` / `pos_var_rate` are the inverse-gamma priors
/// of the class-effect variance and the per-coordinate position variances.
#[derive(Clone, Debug, PartialEq)]
pub struct PriorConfig {
    pub beta_var: f64,
    pub threshold_var: f64,
    pub var_shape: f64,
    pub m_var_rate: f64,
    pub pos_var_rate: f64,
    /// Variance of each eigen vector coordinate about the population mean.
    pub u_var: f64,
    /// Prior variance of the population mean; 0 pins the mean at zero.
    pub mean_var: f64,
    /// Prior variance of each `lambda_k`; `None` means `n`.
    pub lambda_var: Option<f64>,
}

impl Default for PriorConfig {
    fn default() -> Self {
        PriorConfig {
            beta_var: 100.0,
            threshold_var: 100.0,
            var_shape: 2.0,
            m_var_rate: 1.0,
            pos_var_rate: 1.0,
            u_var: 1.0,
            mean_var: 1.0,
            lambda_var: None,
        }
    }
}

impl PriorConfig {
    pub fn lambda_var_for(&self, n: usize) -> f64 {
        self.lambda_var.unwrap_or(n as f64)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.beta_var,
            self.threshold_var,
            self.var_shape,
            self.m_var_rate,
            self.pos_var_rate,
            self.u_var,
        ];
        if positive.iter().any(|v| !(*v > 0.0 && v.is_finite()))
            || !(self.mean_var >= 0.0)
            || self.lambda_var.is_some_and(|v| !(v > 0.0))
        {
            return Err(Error::invalid("prior variances and shapes must be positive"));
        }
        Ok(())
    }
}

/// Draw a latent state (with its hyperparameters) from the prior.
pub fn sample_latent_prior(
    kind: ModelKind,
    n: usize,
    k: usize,
    prior: &PriorConfig,
    rng: &mut RngStream,
) -> Result<LatentState> {
    if k == 0 {
        return Err(Error::invalid("latent dimension must be at least 1"));
    }
    Ok(match kind {
        ModelKind::Class => {
            let m_var = inverse_gamma_draw(prior.var_shape, prior.m_var_rate, rng)?;
            let mut m = vec![0.0; k * k];
            for a in 0..k {
                for b in a..k {
                    let v = m_var.sqrt() * rng.std_normal();
                    m[a * k + b] = v;
                    m[b * k + a] = v;
                }
            }
            let labels = (0..n)
                .map(|_| ((rng.uniform_open() * k as f64) as usize).min(k - 1))
                .collect();
            LatentState::Class(ClassState { labels, m, k, m_var })
        }
        ModelKind::Distance => {
            let pos_var = (0..k)
                .map(|_| inverse_gamma_draw(prior.var_shape, prior.pos_var_rate, rng))
                .collect::<Result<Vec<_>>>()?;
            let positions = (0..n * k)
                .map(|idx| pos_var[idx % k].sqrt() * rng.std_normal())
                .collect();
            LatentState::Distance(DistanceState { positions, k, pos_var })
        }
        ModelKind::Eigen => {
            let vec_mean: Vec<f64> = (0..k)
                .map(|_| prior.mean_var.sqrt() * rng.std_normal())
                .collect();
            let vectors = (0..n * k)
                .map(|idx| vec_mean[idx % k] + prior.u_var.sqrt() * rng.std_normal())
                .collect();
            let sd = prior.lambda_var_for(n).sqrt();
            let lambda = (0..k).map(|_| sd * rng.std_normal()).collect();
            LatentState::Eigen(EigenState { vectors, k, lambda, vec_mean })
        }
    })
}

/// Monte Carlo estimate of the prior variance of `alpha(u_i, u_j)` for a
/// single pair of distinct nodes, hyperparameters included.
///
/// For the distance model `E[alpha^2] = 2 K E[pos_var]` is known in closed
/// form and only the mean is simulated; the plain estimator has infinite
/// variance under the default inverse-gamma(2, ·) hyperprior.
pub fn prior_alpha_variance(
    kind: ModelKind,
    k: usize,
    n: usize,
    prior: &PriorConfig,
    draws: usize,
    rng: &mut RngStream,
) -> Result<f64> {
    prior.validate()?;
    if draws < 2 {
        return Err(Error::invalid("need at least two draws"));
    }
    // node count only enters through the default lambda variance
    let prior = PriorConfig {
        lambda_var: Some(prior.lambda_var_for(n)),
        ..prior.clone()
    };
    let (mut mean, mut m2) = (0.0, 0.0);
    for t in 0..draws {
        let a = sample_latent_prior(kind, 2, k, &prior, rng)?.alpha(0, 1);
        let delta = a - mean;
        mean += delta / (t + 1) as f64;
        m2 += delta * (a - mean);
    }
    if kind == ModelKind::Distance {
        if prior.var_shape <= 1.0 {
            return Err(Error::invalid(
                "inverse-gamma shape must exceed 1 for a finite distance variance",
            ));
        }
        let second = 2.0 * k as f64 * prior.pos_var_rate / (prior.var_shape - 1.0);
        return Ok(second - mean * mean);
    }
    Ok(m2 / (draws - 1) as f64)
}

/// Number of prior draws used by [`calibrate_prior_alpha_variance`].
pub const CALIBRATION_DRAWS: usize = 100_000;

/// Rescales the prior so that `Var[alpha(u_i, u_j)]` equals `target`.
///
/// The class model's variance is exactly the prior mean of `m_var`; the
/// distance and eigen variances are estimated from prior draws and scale
/// linearly in `pos_var_rate` and `lambda_var` respectively.
pub fn calibrate_prior_alpha_variance(
    kind: ModelKind,
    k: usize,
    n: usize,
    prior: &PriorConfig,
    target: f64,
) -> Result<PriorConfig> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::invalid("target variance must be positive"));
    }
    prior.validate()?;
    let mut out = prior.clone();
    match kind {
        ModelKind::Class => {
            if prior.var_shape <= 1.0 {
                return Err(Error::invalid(
                    "inverse-gamma shape must exceed 1 for a finite class-effect variance",
                ));
            }
            out.m_var_rate = target * (prior.var_shape - 1.0);
        }
        ModelKind::Distance | ModelKind::Eigen => {
            let mut rng = RngStream::substream(0x5eed_ca1b, k as u64);
            let v = prior_alpha_variance(kind, k, n, prior, CALIBRATION_DRAWS, &mut rng)?;
            let scale = target / v;
            if kind == ModelKind::Distance {
                out.pos_var_rate *= scale;
            } else {
                out.lambda_var = Some(prior.lambda_var_for(n) * scale);
            }
        }
    }
    Ok(out)
}
