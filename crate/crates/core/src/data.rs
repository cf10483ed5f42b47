//! Symmetric relational datasets: storage, loaders, writers, and
//! cross-validation folds.
//!
//! A [`Sociomatrix`] stores only the upper triangle, so `(i, j)` and `(j, i)`
//! address the same cell and the diagonal cannot be addressed at all.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::stats::RngStream;

/// Maps unordered node pairs `{i, j}` (i ≠ j) onto a flat upper-triangle index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DyadIndex {
    n: usize,
}

impl DyadIndex {
    pub fn new(n: usize) -> Self {
        DyadIndex { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index of `{i, j}`; order of the arguments does not matter.
    pub fn index(&self, i: usize, j: usize) -> Result<usize> {
        for &idx in &[i, j] {
            if idx >= self.n {
                return Err(Error::IndexOutOfRange { index: idx, n: self.n });
            }
        }
        if i == j {
            return Err(Error::Diagonal(i));
        }
        Ok(self.index_unchecked(i, j))
    }

    #[inline]
    pub fn index_unchecked(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        a * (2 * self.n - a - 1) / 2 + (b - a - 1)
    }

    /// All pairs `(i, j)` with `i < j`, in flat-index order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                out.push((i, j));
            }
        }
        out
    }
}

/// Symmetric n×n ordinal relational data with undefined diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sociomatrix {
    index: DyadIndex,
    labels: Vec<String>,
    values: Vec<u32>,
    observed: Vec<bool>,
    levels: Vec<u32>,
}

impl Sociomatrix {
    /// Builds a sociomatrix from upper-triangle arrays in [`DyadIndex`] order.
    ///
    /// Values of unobserved dyads are discarded (stored as 0).
    pub fn new(labels: Vec<String>, mut values: Vec<u32>, observed: Vec<bool>) -> Result<Self> {
        let index = DyadIndex::new(labels.len());
        if values.len() != index.len() || observed.len() != index.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} nodes need {} dyads, got {} values and {} mask entries",
                labels.len(),
                index.len(),
                values.len(),
                observed.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::invalid(format!("duplicate node label `{l}`")));
            }
        }
        for (v, &o) in values.iter_mut().zip(&observed) {
            if !o {
                *v = 0;
            }
        }
        let levels = compute_levels(&values, &observed);
        Ok(Sociomatrix {
            index,
            labels,
            values,
            observed,
            levels,
        })
    }

    /// Fully observed sociomatrix with entries from `f(i, j)`, `i < j`.
    pub fn from_fn(labels: Vec<String>, mut f: impl FnMut(usize, usize) -> u32) -> Result<Self> {
        let index = DyadIndex::new(labels.len());
        let values = index.pairs().into_iter().map(|(i, j)| f(i, j)).collect();
        let observed = vec![true; index.len()];
        Sociomatrix::new(labels, values, observed)
    }

    pub fn n(&self) -> usize {
        self.index.n()
    }

    pub fn dyad_index(&self) -> DyadIndex {
        self.index
    }

    pub fn dyad_count(&self) -> usize {
        self.values.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Value of `{i, j}`, or `None` when the dyad is unobserved.
    pub fn get(&self, i: usize, j: usize) -> Result<Option<u32>> {
        let d = self.index.index(i, j)?;
        Ok(self.value(d))
    }

    /// Value by flat dyad index, `None` when unobserved.
    #[inline]
    pub fn value(&self, d: usize) -> Option<u32> {
        if self.observed[d] {
            Some(self.values[d])
        } else {
            None
        }
    }

    #[inline]
    pub fn is_observed(&self, d: usize) -> bool {
        self.observed[d]
    }

    pub fn observed_count(&self) -> usize {
        self.observed.iter().filter(|&&o| o).count()
    }

    /// Flat indices of observed dyads, ascending.
    pub fn observed_dyads(&self) -> Vec<usize> {
        (0..self.dyad_count()).filter(|&d| self.observed[d]).collect()
    }

    /// Sorted distinct values among observed entries (the sample space).
    pub fn value_levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn is_binary(&self) -> bool {
        self.levels == [0, 1]
    }

    /// Position of each observed value within [`value_levels`](Self::value_levels).
    pub fn level_indices(&self) -> Vec<Option<usize>> {
        (0..self.dyad_count())
            .map(|d| {
                self.value(d)
                    .map(|v| self.levels.binary_search(&v).expect("level table is complete"))
            })
            .collect()
    }

    /// Restriction to the given nodes (kept in the given order).
    pub fn subgraph(&self, nodes: &[usize]) -> Result<Sociomatrix> {
        let labels = nodes
            .iter()
            .map(|&i| {
                self.labels
                    .get(i)
                    .cloned()
                    .ok_or(Error::IndexOutOfRange { index: i, n: self.n() })
            })
            .collect::<Result<Vec<_>>>()?;
        let sub = DyadIndex::new(nodes.len());
        let mut values = Vec::with_capacity(sub.len());
        let mut observed = Vec::with_capacity(sub.len());
        for (a, b) in sub.pairs() {
            let d = self.index.index(nodes[a], nodes[b])?;
            values.push(self.values[d]);
            observed.push(self.observed[d]);
        }
        Sociomatrix::new(labels, values, observed)
    }
}

fn compute_levels(values: &[u32], observed: &[bool]) -> Vec<u32> {
    values
        .iter()
        .zip(observed)
        .filter(|(_, &o)| o)
        .map(|(&v, _)| v)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Optional real covariate vector per dyad (`p = 0` means no covariates).
#[derive(Clone, Debug, PartialEq)]
pub struct DyadCovariates {
    index: DyadIndex,
    p: usize,
    x: Vec<f64>,
}

impl DyadCovariates {
    pub fn none(n: usize) -> Self {
        DyadCovariates {
            index: DyadIndex::new(n),
            p: 0,
            x: Vec::new(),
        }
    }

    /// `x` is dyad-major: `x[d * p + k]`.
    pub fn new(n: usize, p: usize, x: Vec<f64>) -> Result<Self> {
        let index = DyadIndex::new(n);
        if x.len() != index.len() * p {
            return Err(Error::DimensionMismatch(format!(
                "expected {} covariate values, got {}",
                index.len() * p,
                x.len()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("covariates must be finite"));
        }
        Ok(DyadCovariates { index, p, x })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.index.n()
    }

    #[inline]
    pub fn row(&self, d: usize) -> &[f64] {
        &self.x[d * self.p..(d + 1) * self.p]
    }

    pub fn get(&self, i: usize, j: usize) -> Result<&[f64]> {
        Ok(self.row(self.index.index(i, j)?))
    }
}

/// Random partition of the observed dyads into `F` folds numbered `1..=F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldAssignment {
    folds: Vec<Option<usize>>,
    count: usize,
    seed: u64,
}

impl FoldAssignment {
    pub fn fold_count(&self) -> usize {
        self.count
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Fold of dyad `d`, `None` for dyads that were unobserved to begin with.
    pub fn fold_of(&self, d: usize) -> Option<usize> {
        self.folds[d]
    }

    pub fn members(&self, fold: usize) -> Vec<usize> {
        (0..self.folds.len())
            .filter(|&d| self.folds[d] == Some(fold))
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count];
        for f in self.folds.iter().flatten() {
            sizes[f - 1] += 1;
        }
        sizes
    }
}

/// Parses a tab-separated edge list (`label_i  label_j  [value]`).
///
/// A missing value means 1 and `NA` marks the dyad unobserved. Dyads that are
/// never listed take `default` and count as observed. Blank lines and lines
/// starting with `#` are skipped. Node order is first appearance.
pub fn parse_edge_list(text: &str, default: u32) -> Result<Sociomatrix> {
    let mut labels: Vec<String> = Vec::new();
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut entries: HashMap<(usize, usize), Option<u32>> = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("expected 2 or 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let (a, b) = (fields[0].trim(), fields[1].trim());
        if a.is_empty() || b.is_empty() {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: "empty node label".into(),
            });
        }
        if a == b {
            return Err(Error::SelfLoop(a.to_string()));
        }
        let value = match fields.get(2).map(|s| s.trim()) {
            None | Some("") => Some(1),
            Some("NA") => None,
            Some(s) => Some(s.parse::<u32>().map_err(|_| Error::Parse {
                line: lineno + 1,
                msg: format!("value `{s}` is not a non-negative integer"),
            })?),
        };
        let mut id = |l: &str| {
            *ids.entry(l.to_string()).or_insert_with(|| {
                labels.push(l.to_string());
                labels.len() - 1
            })
        };
        let (i, j) = (id(a), id(b));
        let key = if i < j { (i, j) } else { (j, i) };
        match entries.get(&key) {
            Some(prev) if *prev != value => {
                return Err(Error::ConflictingDuplicate(a.to_string(), b.to_string()))
            }
            _ => {
                entries.insert(key, value);
            }
        }
    }
    let index = DyadIndex::new(labels.len());
    let mut values = vec![default; index.len()];
    let mut observed = vec![true; index.len()];
    for ((i, j), v) in entries {
        let d = index.index_unchecked(i, j);
        match v {
            Some(v) => values[d] = v,
            None => observed[d] = false,
        }
    }
    Sociomatrix::new(labels, values, observed)
}

pub fn load_edge_list(path: impl AsRef<Path>, default: u32) -> Result<Sociomatrix> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, default)
}

/// Canonical TSV: every dyad in `i < j` order, `NA` for unobserved.
///
/// Reading the output back with [`parse_edge_list`] reproduces the matrix,
/// and writing that again reproduces the bytes.
pub fn format_edge_list(y: &Sociomatrix) -> String {
    let mut out = String::new();
    for (d, (i, j)) in y.dyad_index().pairs().into_iter().enumerate() {
        let _ = match y.value(d) {
            Some(v) => writeln!(out, "{}\t{}\t{}", y.labels[i], y.labels[j], v),
            None => writeln!(out, "{}\t{}\tNA", y.labels[i], y.labels[j]),
        };
    }
    out
}

pub fn write_edge_list(y: &Sociomatrix, path: impl AsRef<Path>) -> Result<()> {
    write_text(path, &format_edge_list(y))
}

/// Dense CSV: a header row of labels, then one row per node; the diagonal and
/// unobserved cells are `NA`.
pub fn format_dense_csv(y: &Sociomatrix) -> String {
    let mut out = String::new();
    for l in &y.labels {
        out.push(',');
        out.push_str(l);
    }
    out.push('\n');
    for i in 0..y.n() {
        out.push_str(&y.labels[i]);
        for j in 0..y.n() {
            out.push(',');
            match y.get(i, j) {
                Ok(Some(v)) => {
                    let _ = write!(out, "{v}");
                }
                _ => out.push_str("NA"),
            }
        }
        out.push('\n');
    }
    out
}

pub fn parse_dense_csv(text: &str) -> Result<Sociomatrix> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing header".into(),
    })?;
    let labels: Vec<String> = header.split(',').skip(1).map(|s| s.trim().to_string()).collect();
    let n = labels.len();
    let mut full: Vec<Vec<Option<u32>>> = Vec::with_capacity(n);
    for (r, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != n + 1 {
            return Err(Error::Parse {
                line: r + 2,
                msg: format!("expected {} cells, found {}", n + 1, cells.len()),
            });
        }
        if r >= n || cells[0] != labels[r] {
            return Err(Error::Parse {
                line: r + 2,
                msg: "row label does not match header order".into(),
            });
        }
        let row = cells[1..]
            .iter()
            .map(|c| match *c {
                "NA" => Ok(None),
                c => c.parse::<u32>().map(Some).map_err(|_| Error::Parse {
                    line: r + 2,
                    msg: format!("bad cell `{c}`"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        full.push(row);
    }
    if full.len() != n {
        return Err(Error::Parse {
            line: full.len() + 2,
            msg: format!("expected {n} rows, found {}", full.len()),
        });
    }
    let index = DyadIndex::new(n);
    let mut values = Vec::with_capacity(index.len());
    let mut observed = Vec::with_capacity(index.len());
    for (i, j) in index.pairs() {
        if full[i][j] != full[j][i] {
            return Err(Error::invalid(format!(
                "dense matrix is not symmetric at ({}, {})",
                labels[i], labels[j]
            )));
        }
        values.push(full[i][j].unwrap_or(0));
        observed.push(full[i][j].is_some());
    }
    Sociomatrix::new(labels, values, observed)
}

pub fn load_dense_csv(path: impl AsRef<Path>) -> Result<Sociomatrix> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dense_csv(&text)
}

/// Reads `label_i  label_j  x_1 ... x_p` lines for the nodes of `y`.
/// Dyads not listed get the zero vector.
pub fn load_covariates(path: impl AsRef<Path>, y: &Sociomatrix) -> Result<DyadCovariates> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_covariates(&text, y)
}

pub fn parse_covariates(text: &str, y: &Sociomatrix) -> Result<DyadCovariates> {
    let index = y.dyad_index();
    let mut p: Option<usize> = None;
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        let err = |msg: String| Error::Parse { line: lineno + 1, msg };
        if fields.len() < 3 {
            return Err(err("expected two labels and at least one covariate".into()));
        }
        let i = y
            .label_position(fields[0])
            .ok_or_else(|| err(format!("unknown node `{}`", fields[0])))?;
        let j = y
            .label_position(fields[1])
            .ok_or_else(|| err(format!("unknown node `{}`", fields[1])))?;
        let x = fields[2..]
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| err(format!("bad covariate `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        match p {
            None => p = Some(x.len()),
            Some(p) if p != x.len() => return Err(err("inconsistent covariate dimension".into())),
            _ => {}
        }
        rows.push((index.index(i, j)?, x));
    }
    let p = p.unwrap_or(0);
    let mut data = vec![0.0; index.len() * p];
    for (d, x) in rows {
        data[d * p..(d + 1) * p].copy_from_slice(&x);
    }
    DyadCovariates::new(y.n(), p, data)
}

fn is_punctuation_token(c: char) -> bool {
    matches!(c, '.' | ',' | ';' | ':' | '?' | '!')
}

/// Splits text into maximal alphabetic runs (lower-cased) and the single
/// punctuation marks `. , ; : ? !`; every other character separates tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut word = String::new();
    for c in text.chars() {
        if c.is_alphabetic() {
            word.extend(c.to_lowercase());
            continue;
        }
        if !word.is_empty() {
            tokens.push(std::mem::take(&mut word));
        }
        if is_punctuation_token(c) {
            tokens.push(c.to_string());
        }
    }
    if !word.is_empty() {
        tokens.push(word);
    }
    tokens
}

/// Word-adjacency counts: `y[i][j]` is the number of positions where tokens
/// `i` and `j` stand next to each other, in either order. A token next to
/// itself contributes nothing.
pub fn tokenize_adjacency_counts(text: &str) -> Result<Sociomatrix> {
    let tokens = tokenize(text);
    if tokens.is_empty() {
        return Err(Error::EmptyTokens);
    }
    let mut ids: HashMap<&str, usize> = HashMap::new();
    let mut labels = Vec::new();
    let seq: Vec<usize> = tokens
        .iter()
        .map(|t| {
            *ids.entry(t.as_str()).or_insert_with(|| {
                labels.push(t.clone());
                labels.len() - 1
            })
        })
        .collect();
    if labels.len() < 2 {
        return Err(Error::invalid("need at least two distinct tokens"));
    }
    let index = DyadIndex::new(labels.len());
    let mut counts = vec![0u32; index.len()];
    for w in seq.windows(2) {
        if w[0] != w[1] {
            counts[index.index_unchecked(w[0], w[1])] += 1;
        }
    }
    let observed = vec![true; counts.len()];
    Sociomatrix::new(labels, counts, observed)
}

/// Largest connected component of the graph whose edges are observed dyads
/// with value above `threshold`. Equal-size components are ranked by their
/// smallest label.
pub fn largest_connected_component(y: &Sociomatrix, threshold: u32) -> Result<Sociomatrix> {
    if y.observed_count() == 0 {
        return Err(Error::NoObserved);
    }
    let n = y.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (d, (i, j)) in y.dyad_index().pairs().into_iter().enumerate() {
        if matches!(y.value(d), Some(v) if v > threshold) {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut comps: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        comps.entry(r).or_default().push(i);
    }
    let best = comps
        .into_values()
        .max_by(|a, b| {
            let min_label = |c: &Vec<usize>| c.iter().map(|&i| &y.labels[i]).min().cloned();
            a.len()
                .cmp(&b.len())
                .then_with(|| min_label(b).cmp(&min_label(a)))
        })
        .expect("n > 0 when dyads are observed");
    let mut nodes = best;
    nodes.sort_unstable();
    y.subgraph(&nodes)
}

/// Uniformly random partition of the observed dyads into `folds` sets whose
/// sizes differ by at most one. Deterministic given `seed`.
pub fn assign_folds(y: &Sociomatrix, folds: usize, seed: u64) -> Result<FoldAssignment> {
    if folds < 2 {
        return Err(Error::invalid("need at least 2 folds"));
    }
    let mut dyads = y.observed_dyads();
    if dyads.len() < folds {
        return Err(Error::invalid(format!(
            "{folds} folds exceed the {} observed dyads",
            dyads.len()
        )));
    }
    let mut rng = RngStream::new(seed);
    dyads.shuffle(&mut rng);
    let mut assignment = vec![None; y.dyad_count()];
    for (pos, d) in dyads.into_iter().enumerate() {
        assignment[d] = Some(pos % folds + 1);
    }
    Ok(FoldAssignment {
        folds: assignment,
        count: folds,
        seed,
    })
}

/// Copy of `y` with the dyads of `fold` hidden. Hidden values are dropped from
/// the copy; the sample space is recomputed from what remains observed.
pub fn mask_fold(y: &Sociomatrix, folds: &FoldAssignment, fold: usize) -> Result<Sociomatrix> {
    if fold == 0 || fold > folds.fold_count() {
        return Err(Error::invalid(format!(
            "fold {fold} outside 1..={}",
            folds.fold_count()
        )));
    }
    if folds.folds.len() != y.dyad_count() {
        return Err(Error::DimensionMismatch(
            "fold assignment belongs to a different sociomatrix".into(),
        ));
    }
    let observed = (0..y.dyad_count())
        .map(|d| y.observed[d] && folds.folds[d] != Some(fold))
        .collect();
    Sociomatrix::new(y.labels.clone(), y.values.clone(), observed)
}

pub(crate) fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("v{i}")).collect()
    }

    #[test]
    fn dyad_index_is_symmetric_and_dense() {
        let idx = DyadIndex::new(7);
        let mut seen = vec![false; idx.len()];
        for (i, j) in idx.pairs() {
            let d = idx.index(i, j).unwrap();
            assert_eq!(d, idx.index(j, i).unwrap());
            assert!(!seen[d]);
            seen[d] = true;
        }
        assert!(seen.into_iter().all(|s| s));
        assert!(matches!(idx.index(3, 3), Err(Error::Diagonal(3))));
        assert!(idx.index(0, 7).is_err());
    }

    #[test]
    fn single_edge_and_symmetric_duplicate() {
        let y = parse_edge_list("a\tb\t1\n", 0).unwrap();
        assert_eq!(y.n(), 2);
        assert_eq!(y.get(0, 1).unwrap(), Some(1));
        let y2 = parse_edge_list("a\tb\t1\nb\ta\t1\n", 0).unwrap();
        assert_eq!(y, y2);
        let y3 = parse_edge_list("a\tb\n", 0).unwrap();
        assert_eq!(y, y3);
    }

    #[test]
    fn edge_list_errors() {
        assert!(matches!(parse_edge_list("a\ta\t1\n", 0), Err(Error::SelfLoop(_))));
        assert!(matches!(
            parse_edge_list("a\tb\t1\nb\ta\t2\n", 0),
            Err(Error::ConflictingDuplicate(..))
        ));
        assert!(matches!(parse_edge_list("a\tb\t1.5\n", 0), Err(Error::Parse { .. })));
        assert!(matches!(parse_edge_list("a\tb\t-1\n", 0), Err(Error::Parse { .. })));
    }

    #[test]
    fn unlisted_dyads_default_observed() {
        let y = parse_edge_list("a\tb\t2\nb\tc\tNA\n", 0).unwrap();
        assert_eq!(y.get(0, 2).unwrap(), Some(0));
        assert_eq!(y.get(1, 2).unwrap(), None);
        assert_eq!(y.value_levels(), &[0, 2]);
        assert!(y.get(1, 1).is_err());
    }

    #[test]
    fn dense_csv_round_trip() {
        let y = parse_edge_list("a\tb\t2\nb\tc\tNA\nc\td\t1\n", 0).unwrap();
        let text = format_dense_csv(&y);
        let back = parse_dense_csv(&text).unwrap();
        assert_eq!(y, back);
        assert_eq!(text, format_dense_csv(&back));
    }

    #[test]
    fn dense_csv_rejects_asymmetry() {
        let text = ",a,b\na,NA,1\nb,0,NA\n";
        assert!(parse_dense_csv(text).is_err());
    }

    #[test]
    fn tokenizer_hand_count() {
        let y = tokenize_adjacency_counts("God said, God said").unwrap();
        assert_eq!(y.labels(), &["god", "said", ","]);
        assert_eq!(y.get(0, 1).unwrap(), Some(2));
        assert_eq!(y.get(1, 2).unwrap(), Some(1));
        assert_eq!(y.get(2, 0).unwrap(), Some(1));
        let y = tokenize_adjacency_counts("a b a").unwrap();
        assert_eq!(y.get(0, 1).unwrap(), Some(2));
    }

    #[test]
    fn tokenizer_discards_self_adjacency() {
        let y = tokenize_adjacency_counts("very very good").unwrap();
        assert_eq!(y.get(0, 1).unwrap(), Some(1));
        assert!(matches!(tokenize_adjacency_counts("  12 34 "), Err(Error::EmptyTokens)));
    }

    #[test]
    fn lcc_tie_broken_by_label() {
        // triangles {a,b,c} and {d,e,f} plus isolated g
        let text = "a\tb\nb\tc\na\tc\nd\te\ne\tf\nd\tf\ng\ta\t0\n";
        let y = parse_edge_list(text, 0).unwrap();
        let c = largest_connected_component(&y, 0).unwrap();
        assert_eq!(c.labels(), &["a", "b", "c"]);
        let text = "d\te\ne\tf\nd\tf\na\tb\nb\tc\na\tc\n";
        let c = largest_connected_component(&parse_edge_list(text, 0).unwrap(), 0).unwrap();
        assert_eq!(c.labels(), &["a", "b", "c"]);
    }

    #[test]
    fn lcc_prefers_larger() {
        let text = "x\ty\np\tq\nq\tr\nr\ts\n";
        let c = largest_connected_component(&parse_edge_list(text, 0).unwrap(), 0).unwrap();
        assert_eq!(c.labels(), &["p", "q", "r", "s"]);
        assert_eq!(c.get(0, 1).unwrap(), Some(1));
        assert_eq!(c.get(0, 2).unwrap(), Some(0));
    }

    #[test]
    fn lcc_requires_observations() {
        let y = Sociomatrix::new(labels(3), vec![0; 3], vec![false; 3]).unwrap();
        assert!(matches!(largest_connected_component(&y, 0), Err(Error::NoObserved)));
    }

    #[test]
    fn fold_sizes() {
        let y5 = Sociomatrix::from_fn(labels(5), |_, _| 0).unwrap();
        let f = assign_folds(&y5, 5, 1).unwrap();
        assert_eq!(f.sizes(), vec![2; 5]);
        let mut obs = vec![true; 15];
        for o in obs.iter_mut().take(4) {
            *o = false;
        }
        let y11 = Sociomatrix::new(labels(6), vec![1; 15], obs).unwrap();
        let f = assign_folds(&y11, 5, 2).unwrap();
        let mut sizes = f.sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 2, 2, 3]);
        assert_eq!(f, assign_folds(&y11, 5, 2).unwrap());
        assert!(assign_folds(&y11, 12, 2).is_err());
        assert!(assign_folds(&y11, 1, 2).is_err());
    }

    #[test]
    fn masking_hides_values() {
        let y = Sociomatrix::from_fn(labels(6), |i, j| ((i + j) % 3) as u32).unwrap();
        let f = assign_folds(&y, 5, 7).unwrap();
        let mut hidden = vec![0; y.dyad_count()];
        for s in 1..=5 {
            let m = mask_fold(&y, &f, s).unwrap();
            assert_eq!(m.observed_count(), y.observed_count() - f.members(s).len());
            for d in f.members(s) {
                assert_eq!(m.value(d), None);
                hidden[d] += 1;
            }
        }
        assert!(hidden.iter().all(|&h| h == 1));
        assert!(mask_fold(&y, &f, 0).is_err());
        assert!(mask_fold(&y, &f, 6).is_err());
    }
}
