//! Cross-validated link prediction, ROC curves and the AUC table.
//!
//! Ordinal data are fit with the full ordered likelihood and scored on the
//! binary event "value above the lowest level".

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::data::{assign_folds, mask_fold, write_text, DyadCovariates, FoldAssignment, Sociomatrix};
use crate::error::{Error, Result};
use crate::mcmc::{run_chain_with_rng, SamplerConfig};
use crate::model::{calibrate_prior_alpha_variance, ModelKind, PriorConfig};
use crate::stats::RngStream;

/// Out-of-sample predictions for every dyad.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictionMatrix {
    pub yhat: Vec<f64>,
    pub folds: FoldAssignment,
    /// Whether each dyad's value exceeds the lowest level (`None` if unobserved).
    pub truth: Vec<Option<bool>>,
    pub pairs: Vec<(usize, usize)>,
}

impl PredictionMatrix {
    /// Scores and labels for the dyads with known truth.
    pub fn scored(&self) -> (Vec<f64>, Vec<bool>) {
        self.yhat
            .iter()
            .zip(&self.truth)
            .filter_map(|(&s, t)| t.map(|t| (s, t)))
            .unzip()
    }

    /// Tab-separated `i j fold truth yhat` (1-based nodes, `NA` for missing).
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("i\tj\tfold\ttruth\tyhat\n");
        for (d, &(i, j)) in self.pairs.iter().enumerate() {
            let fold = self.folds.fold_of(d).map_or("NA".to_string(), |f| f.to_string());
            let truth = self.truth[d].map_or("NA", |t| if t { "1" } else { "0" });
            let _ = writeln!(out, "{}\t{}\t{fold}\t{truth}\t{:.10}", i + 1, j + 1, self.yhat[d]);
        }
        out
    }

    pub fn write_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_text(path, &self.to_tsv())
    }
}

/// Binarized truth of `y`: value above its lowest observed level.
pub fn binarize(y: &Sociomatrix) -> Vec<Option<bool>> {
    y.level_indices().into_iter().map(|l| l.map(|l| l > 0)).collect()
}

/// Cross-validation settings beyond the sampler itself.
#[derive(Clone, Debug, PartialEq)]
pub struct CvConfig {
    pub folds: usize,
    pub sampler: SamplerConfig,
    pub prior: PriorConfig,
    /// Rescale the prior so that `Var[alpha] = calibration_target` (`None` skips).
    pub calibration_target: Option<f64>,
    /// Worker threads for fold fits.
    pub jobs: usize,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 5,
            sampler: SamplerConfig::default(),
            prior: PriorConfig::default(),
            calibration_target: Some(1.0),
            jobs: 1,
        }
    }
}

/// F-fold cross-validation: each fold's dyads are masked, a chain is fit on
/// the rest, and the masked dyads receive their posterior predictive mean.
///
/// Fold `s` uses random substream `s` of `config.sampler.seed`, so the result
/// does not depend on `config.jobs`.
pub fn cross_validate(
    y: &Sociomatrix,
    x: &DyadCovariates,
    kind: ModelKind,
    k: usize,
    config: &CvConfig,
) -> Result<PredictionMatrix> {
    config.sampler.validate()?;
    if config.jobs == 0 {
        return Err(Error::invalid("jobs must be at least 1"));
    }
    let folds = assign_folds(y, config.folds, config.sampler.seed)?;
    let prior = match config.calibration_target {
        Some(target) => calibrate_prior_alpha_variance(kind, k, y.n(), &config.prior, target)?,
        None => config.prior.clone(),
    };
    let fit_fold = |fold: usize| -> Result<Vec<(usize, f64)>> {
        let masked = mask_fold(y, &folds, fold)?;
        let rng = RngStream::substream(config.sampler.seed, fold as u64);
        let trace = run_chain_with_rng(&masked, x, kind, k, &config.sampler, &prior, rng)?;
        folds
            .members(fold)
            .into_iter()
            .map(|d| Ok((d, trace.predictive_mean(d)?)))
            .collect()
    };
    let fold_ids: Vec<usize> = (1..=config.folds).collect();
    let results: Vec<Result<Vec<(usize, f64)>>> = if config.jobs == 1 {
        fold_ids.iter().map(|&f| fit_fold(f)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
        pool.install(|| fold_ids.par_iter().map(|&f| fit_fold(f)).collect())
    };
    let mut yhat = vec![f64::NAN; y.dyad_count()];
    for r in results {
        for (d, v) in r? {
            yhat[d] = v;
        }
    }
    Ok(PredictionMatrix {
        yhat,
        folds,
        truth: binarize(y),
        pairs: y.dyad_index().pairs(),
    })
}

/// ROC curve in normalized rates; one point per distinct score.
#[derive(Clone, Debug, PartialEq)]
pub struct RocCurve {
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

impl RocCurve {
    /// Tab-separated `fpr tpr`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("fpr\ttpr\n");
        for (f, t) in &self.points {
            let _ = writeln!(out, "{f:.10}\t{t:.10}");
        }
        out
    }

    pub fn write_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_text(path, &self.to_tsv())
    }
}

/// ROC curve of the scored dyads of `pred`.
pub fn roc_curve(pred: &PredictionMatrix) -> Result<RocCurve> {
    let (scores, truth) = pred.scored();
    roc_from_scores(&scores, &truth)
}

/// ROC curve and trapezoid AUC; tied scores move along the diagonal together.
pub fn roc_from_scores(scores: &[f64], truth: &[bool]) -> Result<RocCurve> {
    if scores.len() != truth.len() {
        return Err(Error::DimensionMismatch("scores and truth differ in length".into()));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::invalid("scores contain NaN"));
    }
    let pos = truth.iter().filter(|&&t| t).count();
    let neg = truth.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut auc = 0.0;
    let mut idx = 0;
    while idx < order.len() {
        let s = scores[order[idx]];
        let (tp0, fp0) = (tp, fp);
        while idx < order.len() && scores[order[idx]] == s {
            if truth[order[idx]] {
                tp += 1;
            } else {
                fp += 1;
            }
            idx += 1;
        }
        auc += (fp - fp0) as f64 * (tp + tp0) as f64 / 2.0;
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
    }
    Ok(RocCurve {
        points,
        auc: auc / (pos as f64 * neg as f64),
    })
}

/// Mann-Whitney AUC by brute force over positive-negative pairs (ties count ½).
pub fn auc_pairwise(scores: &[f64], truth: &[bool]) -> Result<f64> {
    let pos: Vec<f64> = scores.iter().zip(truth).filter(|(_, &t)| t).map(|(&s, _)| s).collect();
    let neg: Vec<f64> = scores.iter().zip(truth).filter(|(_, &t)| !t).map(|(&s, _)| s).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::SingleClass);
    }
    let mut total = 0.0;
    for p in &pos {
        for q in &neg {
            total += if p > q {
                1.0
            } else if p == q {
                0.5
            } else {
                0.0
            };
        }
    }
    Ok(total / (pos.len() * neg.len()) as f64)
}

/// AUC values keyed by `(K, dataset, model)`, in the layout of one row per
/// `K` and one column per dataset/model pair.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AucTable {
    pub datasets: Vec<String>,
    pub models: Vec<ModelKind>,
    pub ks: Vec<usize>,
    values: BTreeMap<(usize, String, ModelKind), f64>,
}

impl AucTable {
    pub fn new(datasets: Vec<String>, models: Vec<ModelKind>, ks: Vec<usize>) -> Self {
        AucTable {
            datasets,
            models,
            ks,
            values: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, k: usize, dataset: &str, model: ModelKind, auc: f64) {
        self.values.insert((k, dataset.to_string(), model), auc);
    }

    pub fn get(&self, k: usize, dataset: &str, model: ModelKind) -> Option<f64> {
        self.values.get(&(k, dataset.to_string(), model)).copied()
    }

    /// CSV with header `K,<dataset>/<model>,...`; values to 2 decimals, `NA` if absent.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("K");
        for ds in &self.datasets {
            for m in &self.models {
                let _ = write!(out, ",{ds}/{m}");
            }
        }
        out.push('\n');
        for &k in &self.ks {
            out.push_str(&k.to_string());
            for ds in &self.datasets {
                for &m in &self.models {
                    match self.get(k, ds, m) {
                        Some(v) => {
                            let _ = write!(out, ",{v:.2}");
                        }
                        None => out.push_str(",NA"),
                    }
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            msg: "empty table".into(),
        })?;
        let mut cols = header.split(',');
        if cols.next().map(str::trim) != Some("K") {
            return Err(Error::Parse {
                line: 1,
                msg: "first column must be K".into(),
            });
        }
        let mut table = AucTable::default();
        let mut keys = Vec::new();
        for c in cols {
            let (ds, m) = c.trim().rsplit_once('/').ok_or_else(|| Error::Parse {
                line: 1,
                msg: format!("column {c:?} is not dataset/model"),
            })?;
            let m: ModelKind = m.parse()?;
            if !table.datasets.iter().any(|d| d == ds) {
                table.datasets.push(ds.to_string());
            }
            if !table.models.contains(&m) {
                table.models.push(m);
            }
            keys.push((ds.to_string(), m));
        }
        for (lineno, line) in lines.enumerate() {
            let parse_err = |msg: String| Error::Parse { line: lineno + 2, msg };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != keys.len() + 1 {
                return Err(parse_err(format!("expected {} fields", keys.len() + 1)));
            }
            let k: usize = fields[0].parse().map_err(|_| parse_err(format!("bad K {:?}", fields[0])))?;
            table.ks.push(k);
            for ((ds, m), f) in keys.iter().zip(&fields[1..]) {
                if *f == "NA" {
                    continue;
                }
                let v: f64 = f.parse().map_err(|_| parse_err(format!("bad value {f:?}")))?;
                table.set(k, ds, *m, v);
            }
        }
        Ok(table)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_text(path, &self.to_csv())
    }
}

/// A named dataset for [`auc_table`].
#[derive(Clone, Debug)]
pub struct Dataset {
    pub name: String,
    pub y: Sociomatrix,
    pub x: DyadCovariates,
}

/// Cross-validated AUC for every dataset, model and latent dimension.
pub fn auc_table(datasets: &[Dataset], models: &[ModelKind], ks: &[usize], config: &CvConfig) -> Result<AucTable> {
    let mut table = AucTable::new(
        datasets.iter().map(|d| d.name.clone()).collect(),
        models.to_vec(),
        ks.to_vec(),
    );
    for ds in datasets {
        for &m in models {
            for &k in ks {
                let pred = cross_validate(&ds.y, &ds.x, m, k, config)?;
                table.set(k, &ds.name, m, roc_curve(&pred)?.auc);
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roc_examples() {
        let r = roc_from_scores(&[0.1, 0.4, 0.35, 0.8], &[false, false, true, true]).unwrap();
        assert!((r.auc - 0.75).abs() < 1e-12);
        assert_eq!(r.points.first(), Some(&(0.0, 0.0)));
        assert_eq!(r.points.last(), Some(&(1.0, 1.0)));
        let r = roc_from_scores(&[0.3; 6], &[true, false, true, false, false, true]).unwrap();
        assert_eq!(r.auc, 0.5);
        assert_eq!(r.points, vec![(0.0, 0.0), (1.0, 1.0)]);
        let r = roc_from_scores(&[0.9, 0.8, 0.1], &[true, true, false]).unwrap();
        assert_eq!(r.auc, 1.0);
        assert!(matches!(roc_from_scores(&[0.1, 0.2], &[true, true]), Err(Error::SingleClass)));
    }

    #[test]
    fn table_round_trip() {
        let mut t = AucTable::new(vec!["genesis".into()], ModelKind::ALL.to_vec(), vec![3, 5]);
        t.set(3, "genesis", ModelKind::Eigen, 0.8234);
        t.set(5, "genesis", ModelKind::Distance, 0.661);
        let csv = t.to_csv();
        assert!(csv.starts_with("K,genesis/dist,genesis/class,genesis/eigen\n3,NA,NA,0.82\n"));
        let back = AucTable::from_csv(&csv).unwrap();
        assert_eq!(back.to_csv(), csv);
        assert_eq!(back.get(5, "genesis", ModelKind::Distance), Some(0.66));
        assert!(AucTable::from_csv("X,a/dist\n").is_err());
        assert!(AucTable::from_csv("K,a/dist\n3,0.1,0.2\n").is_err());
    }
}
