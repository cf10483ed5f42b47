use std::fmt::Write as _;
use std::path::Path;

use super::Chain;
use crate::error::{Error, Result};
use crate::model::{GlobalParams, LatentState, ModelKind};

/// Samples recorded after burn-in plus running predictive accumulators.
///
/// Each row holds the scalar parameters of one recorded state; the per-dyad
/// accumulators sum `P(y above the lowest level)` over the same states.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    kind: ModelKind,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
    theta_sum: Vec<f64>,
    theta_min: Vec<f64>,
    theta_max: Vec<f64>,
    accepted: usize,
    proposed: usize,
    mh_step: f64,
    last_globals: Option<GlobalParams>,
    last_latent: Option<LatentState>,
}

impl Trace {
    pub(crate) fn new(chain: &Chain<'_>) -> Self {
        let k = chain.state().latent.k();
        let mut columns = vec!["sweep".to_string()];
        columns.extend((1..chain.level_count()).map(|l| format!("threshold_{l}")));
        columns.extend((1..=chain.state().globals.beta.len()).map(|b| format!("beta_{b}")));
        match chain.kind() {
            ModelKind::Class => columns.push("m_var".into()),
            ModelKind::Distance => {
                columns.extend((1..=k).map(|c| format!("pos_var_{c}")));
                columns.push("acceptance".into());
            }
            ModelKind::Eigen => {
                columns.extend((1..=k).map(|c| format!("lambda_{c}")));
                columns.extend((1..=k).map(|c| format!("vec_mean_{c}")));
            }
        }
        let dyads = chain.dyad_count();
        Trace {
            kind: chain.kind(),
            columns,
            rows: Vec::new(),
            theta_sum: vec![0.0; dyads],
            theta_min: vec![f64::INFINITY; dyads],
            theta_max: vec![f64::NEG_INFINITY; dyads],
            accepted: 0,
            proposed: 0,
            mh_step: chain.mh_step(),
            last_globals: None,
            last_latent: None,
        }
    }

    /// Appends the chain's current state.
    pub fn record(&mut self, chain: &Chain<'_>) {
        let st = chain.state();
        let mut row = vec![chain.sweeps_done() as f64];
        row.extend(&st.globals.thresholds);
        row.extend(&st.globals.beta);
        match &st.latent {
            LatentState::Class(s) => row.push(s.m_var),
            LatentState::Distance(s) => {
                row.extend(&s.pos_var);
                row.push(chain.last_acceptance().unwrap_or(f64::NAN));
            }
            LatentState::Eigen(s) => {
                row.extend(&s.lambda);
                row.extend(&s.vec_mean);
            }
        }
        self.rows.push(row);
        for d in 0..self.theta_sum.len() {
            let t = chain.theta(d);
            self.theta_sum[d] += t;
            self.theta_min[d] = self.theta_min[d].min(t);
            self.theta_max[d] = self.theta_max[d].max(t);
        }
    }

    pub(crate) fn note_acceptance(&mut self, chain: &Chain<'_>) {
        if let Some(rate) = chain.last_acceptance() {
            let proposed = chain.n();
            self.proposed += proposed;
            self.accepted += (rate * proposed as f64).round() as usize;
        }
    }

    pub(crate) fn finish(&mut self, chain: &Chain<'_>) {
        self.mh_step = chain.mh_step();
        self.last_globals = Some(chain.state().globals.clone());
        self.last_latent = Some(chain.state().latent.clone());
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// Number of recorded samples.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// All recorded values of one named column.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.columns.iter().position(|x| x == name)?;
        Some(self.rows.iter().map(|r| r[c]).collect())
    }

    /// Post-burn-in acceptance rate of the distance-model proposals.
    pub fn acceptance_rate(&self) -> Option<f64> {
        (self.proposed > 0).then(|| self.accepted as f64 / self.proposed as f64)
    }

    /// Proposal scale in force after burn-in.
    pub fn mh_step(&self) -> f64 {
        self.mh_step
    }

    pub fn last_globals(&self) -> Option<&GlobalParams> {
        self.last_globals.as_ref()
    }

    pub fn last_latent(&self) -> Option<&LatentState> {
        self.last_latent.as_ref()
    }

    pub fn dyad_count(&self) -> usize {
        self.theta_sum.len()
    }

    /// Posterior mean of `P(y_d above the lowest level)`.
    pub fn predictive_mean(&self, d: usize) -> Result<f64> {
        if self.rows.is_empty() {
            return Err(Error::EmptyTrace);
        }
        let mean = self.theta_sum[d] / self.rows.len() as f64;
        Ok(mean.clamp(self.theta_min[d], self.theta_max[d]))
    }

    /// Smallest and largest recorded `theta` for dyad `d`.
    pub fn theta_range(&self, d: usize) -> (f64, f64) {
        (self.theta_min[d], self.theta_max[d])
    }

    /// CSV of the recorded scalar parameters, one row per sample.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (c, v) in row.iter().enumerate() {
                if c > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        crate::data::write_text(path, &self.to_csv())
    }
}

/// Posterior predictive means for the given dyads.
pub fn posterior_predictive_mean(trace: &Trace, dyads: &[usize]) -> Result<Vec<f64>> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    dyads
        .iter()
        .map(|&d| {
            if d >= trace.dyad_count() {
                return Err(Error::IndexOutOfRange {
                    index: d,
                    n: trace.dyad_count(),
                });
            }
            trace.predictive_mean(d)
        })
        .collect()
}
