//! Joint-distribution ("getting it right") check of the sampler.
//!
//! Two simulators target the same joint law of parameters and data:
//!
//! - marginal-conditional: parameters from the prior, then data given them;
//! - successive-conditional: alternate one sampler sweep (parameters given
//!   data) with a fresh draw of the data given the parameters.
//!
//! Moments of a set of test functions must agree between the two. The
//! successive-conditional chain is autocorrelated, so its standard error uses
//! batch means.

use std::fmt;

use super::{Chain, SamplerConfig};
use crate::data::{DyadCovariates, DyadIndex};
use crate::error::Result;
use crate::model::{sample_latent_prior, GlobalParams, Kernel, LatentState, ModelKind, PriorConfig};
use crate::stats::RngStream;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckConfig {
    pub n: usize,
    pub k: usize,
    /// Size of the ordinal sample space (2 for binary).
    pub levels: usize,
    pub rounds: usize,
    /// Include one standard-normal covariate so the `beta` step is exercised.
    pub with_covariate: bool,
    pub prior: PriorConfig,
    pub mh_step: f64,
    pub batches: usize,
    /// Largest tolerated |standardized discrepancy|.
    pub tolerance: f64,
    pub seed: u64,
    /// Draw observed `z` on the wrong side of their thresholds (mutation test).
    pub corrupt_truncation: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            n: 6,
            k: 2,
            levels: 2,
            rounds: 100_000,
            with_covariate: true,
            prior: PriorConfig {
                beta_var: 1.0,
                threshold_var: 1.0,
                var_shape: 6.0,
                m_var_rate: 5.0,
                pos_var_rate: 5.0,
                u_var: 1.0,
                mean_var: 1.0,
                lambda_var: Some(1.0),
            },
            mh_step: 1.0,
            batches: 100,
            tolerance: 4.0,
            seed: 2024,
            corrupt_truncation: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckStatistic {
    pub name: String,
    pub forward_mean: f64,
    pub chain_mean: f64,
    /// Standardized difference of the two means.
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub kind: ModelKind,
    pub levels: usize,
    pub tolerance: f64,
    pub statistics: Vec<CheckStatistic>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.statistics.iter().all(|s| s.z.abs() <= self.tolerance)
    }

    pub fn max_abs_z(&self) -> f64 {
        self.statistics
            .iter()
            .map(|s| s.z.abs())
            .fold(0.0, |a, b| if b.is_nan() { f64::INFINITY } else { a.max(b) })
    }

    pub fn flagged(&self) -> Vec<&CheckStatistic> {
        self.statistics
            .iter()
            .filter(|s| !(s.z.abs() <= self.tolerance))
            .collect()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "joint-distribution check: {} model, {} levels ({})",
            self.kind,
            self.levels,
            if self.passed() { "pass" } else { "FAIL" }
        )?;
        for s in &self.statistics {
            writeln!(
                f,
                "  {:<16} forward {:>10.5}  chain {:>10.5}  z {:>8.3}{}",
                s.name,
                s.forward_mean,
                s.chain_mean,
                s.z,
                if s.z.abs() <= self.tolerance { "" } else { "  <-- flagged" }
            )?;
        }
        Ok(())
    }
}

struct Instance {
    pairs: Vec<(usize, usize)>,
    levels: usize,
}

impl Instance {
    fn names(&self, kind: ModelKind, p: usize) -> Vec<String> {
        let mut names = Vec::new();
        for l in 1..self.levels {
            names.push(format!("threshold_{l}"));
            names.push(format!("threshold_{l}^2"));
        }
        for b in 1..=p {
            names.push(format!("beta_{b}"));
            names.push(format!("beta_{b}^2"));
        }
        names.push("mean_alpha".into());
        names.push("mean_alpha^2".into());
        names.push("mean_z".into());
        for l in 0..self.levels - 1 {
            names.push(format!("frac_level_{l}"));
        }
        match kind {
            ModelKind::Class => {
                names.push("m_var".into());
                names.push("mean_M^2".into());
            }
            ModelKind::Distance => {
                names.push("mean_pos_var".into());
                names.push("mean_|u|^2".into());
            }
            ModelKind::Eigen => {
                names.push("sum_lambda^2".into());
                names.push("mean_u^2".into());
                names.push("mean_vec_mean".into());
            }
        }
        names
    }

    fn stats(
        &self,
        globals: &GlobalParams,
        latent: &LatentState,
        z: &[f64],
        levels: &[Option<usize>],
    ) -> Vec<f64> {
        let mut out = Vec::new();
        for &t in &globals.thresholds {
            out.push(t);
            out.push(t * t);
        }
        for &b in &globals.beta {
            out.push(b);
            out.push(b * b);
        }
        let nd = self.pairs.len() as f64;
        let (mut a1, mut a2) = (0.0, 0.0);
        for &(i, j) in &self.pairs {
            let a = latent.alpha(i, j);
            a1 += a;
            a2 += a * a;
        }
        out.push(a1 / nd);
        out.push(a2 / nd);
        out.push(z.iter().sum::<f64>() / nd);
        for l in 0..self.levels - 1 {
            out.push(levels.iter().filter(|&&x| x == Some(l)).count() as f64 / nd);
        }
        match latent {
            LatentState::Class(s) => {
                out.push(s.m_var);
                out.push(s.m.iter().map(|v| v * v).sum::<f64>() / s.m.len() as f64);
            }
            LatentState::Distance(s) => {
                out.push(s.pos_var.iter().sum::<f64>() / s.k as f64);
                let n = s.positions.len() / s.k;
                out.push(s.positions.iter().map(|v| v * v).sum::<f64>() / n as f64);
            }
            LatentState::Eigen(s) => {
                out.push(s.lambda.iter().map(|v| v * v).sum());
                out.push(s.vectors.iter().map(|v| v * v).sum::<f64>() / s.vectors.len() as f64);
                out.push(s.vec_mean.iter().sum::<f64>() / s.k as f64);
            }
        }
        out
    }
}

fn prior_globals(levels: usize, p: usize, prior: &PriorConfig, rng: &mut RngStream) -> GlobalParams {
    // iid normals sorted = normal prior restricted to the ordered region
    let sd = prior.threshold_var.sqrt();
    let mut thresholds: Vec<f64> = (1..levels).map(|_| sd * rng.std_normal()).collect();
    thresholds.sort_by(f64::total_cmp);
    let bsd = prior.beta_var.sqrt();
    let beta = (0..p).map(|_| bsd * rng.std_normal()).collect();
    GlobalParams { beta, thresholds }
}

fn forward_data(
    globals: &GlobalParams,
    latent: &LatentState,
    x: &DyadCovariates,
    pairs: &[(usize, usize)],
    rng: &mut RngStream,
) -> (Vec<f64>, Vec<Option<usize>>) {
    let mut z = Vec::with_capacity(pairs.len());
    let mut levels = Vec::with_capacity(pairs.len());
    for (d, &(i, j)) in pairs.iter().enumerate() {
        let xb: f64 = globals.beta.iter().zip(x.row(d)).map(|(b, v)| b * v).sum();
        let zi = xb + latent.alpha(i, j) + rng.std_normal();
        z.push(zi);
        levels.push(Some(globals.level_of(zi)));
    }
    (z, levels)
}

#[derive(Default, Clone)]
struct Moments {
    sum: f64,
    sumsq: f64,
    n: usize,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.sum += v;
        self.sumsq += v * v;
        self.n += 1;
    }

    fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }

    fn var(&self) -> f64 {
        let m = self.mean();
        (self.sumsq / self.n as f64 - m * m).max(0.0) * self.n as f64 / (self.n - 1) as f64
    }
}

/// Compares forward simulation with sampler-driven simulation on a tiny
/// instance; see the module docs. Deterministic given `config.seed`.
pub fn joint_distribution_check(kind: ModelKind, config: &CheckConfig) -> Result<CheckReport> {
    let index = DyadIndex::new(config.n);
    let pairs = index.pairs();
    let p = usize::from(config.with_covariate);
    let mut xrng = RngStream::substream(config.seed, 0);
    let x = DyadCovariates::new(
        config.n,
        p,
        (0..pairs.len() * p).map(|_| xrng.std_normal()).collect(),
    )?;
    let inst = Instance {
        pairs: pairs.clone(),
        levels: config.levels,
    };
    let names = inst.names(kind, p);
    let rounds = config.rounds.max(config.batches * 2);

    // marginal-conditional
    let mut rng = RngStream::substream(config.seed, 1);
    let mut forward = vec![Moments::default(); names.len()];
    for _ in 0..rounds {
        let g = prior_globals(config.levels, p, &config.prior, &mut rng);
        let latent = sample_latent_prior(kind, config.n, config.k, &config.prior, &mut rng)?;
        let (z, levels) = forward_data(&g, &latent, &x, &pairs, &mut rng);
        for (m, v) in forward.iter_mut().zip(inst.stats(&g, &latent, &z, &levels)) {
            m.push(v);
        }
    }

    // successive-conditional
    let sampler = SamplerConfig {
        iterations: 2,
        burn_in: 0,
        thin: 1,
        mh_step: config.mh_step,
        adapt: false,
        seed: config.seed,
    };
    let mut rng = RngStream::substream(config.seed, 2);
    let g0 = prior_globals(config.levels, p, &config.prior, &mut rng);
    let latent0 = sample_latent_prior(kind, config.n, config.k, &config.prior, &mut rng)?;
    let (z0, levels0) = forward_data(&g0, &latent0, &x, &pairs, &mut rng);
    let mut chain = Chain::with_levels(
        config.n,
        levels0,
        config.levels,
        &x,
        kind,
        config.k,
        &config.prior,
        &sampler,
        RngStream::substream(config.seed, 3),
    )?;
    chain.set_parameters(g0, latent0)?;
    chain.set_z(z0);
    chain.corrupt_truncation(config.corrupt_truncation);

    let batch_len = rounds / config.batches;
    let mut overall = vec![Moments::default(); names.len()];
    let mut batch_means = vec![Moments::default(); names.len()];
    let mut batch_sum = vec![0.0; names.len()];
    for r in 0..batch_len * config.batches {
        chain.sweep()?;
        let st = chain.state();
        let (globals, latent) = (st.globals.clone(), st.latent.clone());
        let (z, levels) = forward_data(&globals, &latent, &x, &pairs, chain.rng());
        let vals = inst.stats(&globals, &latent, &z, &levels);
        chain.set_z(z);
        chain.set_levels(levels);
        for (c, v) in vals.into_iter().enumerate() {
            overall[c].push(v);
            batch_sum[c] += v;
        }
        if (r + 1) % batch_len == 0 {
            for c in 0..names.len() {
                batch_means[c].push(batch_sum[c] / batch_len as f64);
                batch_sum[c] = 0.0;
            }
        }
    }

    let statistics = names
        .into_iter()
        .enumerate()
        .map(|(c, name)| {
            let se2 = forward[c].var() / forward[c].n as f64
                + batch_means[c].var() / batch_means[c].n as f64;
            let diff = forward[c].mean() - overall[c].mean();
            let z = if se2 > 0.0 {
                diff / se2.sqrt()
            } else if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            CheckStatistic {
                name,
                forward_mean: forward[c].mean(),
                chain_mean: overall[c].mean(),
                z,
            }
        })
        .collect();
    Ok(CheckReport {
        kind,
        levels: config.levels,
        tolerance: config.tolerance,
        statistics,
    })
}
