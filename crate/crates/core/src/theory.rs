//! Numerical checks of which kernel families can represent which.
//!
//! - A class-model matrix, completed with `M[c_i, c_i]` on the diagonal, has
//!   at most `K` distinct rows and hence rank at most `K`.
//! - Squared distances among points in `R^K` form a matrix of rank at most
//!   `K + 2`, and lifting the points onto a large sphere in `R^{K+1}` gives
//!   inner products ordered exactly like the negative distances.
//! - The rank-one "star" pattern `e_1j = r > e_ij = r²` cannot be matched in
//!   order by distances once there are more outer points than fit around a
//!   centre (six in the plane). [`distance_feasibility_search`] probes this
//!   numerically; it is evidence, not a proof.

use std::fmt;

use nalgebra::DMatrix;

use crate::data::DyadIndex;
use crate::error::{Error, Result};
use crate::model::{ClassState, EigenState, Kernel};
use crate::stats::RngStream;

/// Default relative tolerance for [`numerical_rank`].
pub const RANK_TOLERANCE: f64 = 1e-8;

/// Off-diagonal kernel values of an n-node sociomatrix, with an optional diagonal completion.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaMatrix {
    index: DyadIndex,
    entries: Vec<f64>,
    diagonal: Option<Vec<f64>>,
}

impl AlphaMatrix {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        let index = DyadIndex::new(n);
        if entries.len() != index.len() {
            return Err(Error::DimensionMismatch(format!(
                "{n} nodes need {} entries, got {}",
                index.len(),
                entries.len()
            )));
        }
        Ok(AlphaMatrix {
            index,
            entries,
            diagonal: None,
        })
    }

    pub fn from_kernel(kernel: &impl Kernel) -> Self {
        let index = DyadIndex::new(kernel.node_count());
        let entries = index.pairs().into_iter().map(|(i, j)| kernel.alpha(i, j)).collect();
        AlphaMatrix {
            index,
            entries,
            diagonal: None,
        }
    }

    pub fn with_diagonal(mut self, diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.len() != self.n() {
            return Err(Error::DimensionMismatch("diagonal length".into()));
        }
        self.diagonal = Some(diagonal);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.index.n()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn diagonal(&self) -> Option<&[f64]> {
        self.diagonal.as_deref()
    }

    pub fn get(&self, i: usize, j: usize) -> Result<f64> {
        Ok(self.entries[self.index.index(i, j)?])
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> AlphaMatrix {
        AlphaMatrix {
            index: self.index,
            entries: self.entries.iter().map(|&v| f(v)).collect(),
            diagonal: self.diagonal.as_ref().map(|d| d.iter().map(|&v| f(v)).collect()),
        }
    }

    /// Full symmetric matrix; the diagonal is the completion or zero.
    pub fn to_full(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut m = DMatrix::zeros(n, n);
        for (d, (i, j)) in self.index.pairs().into_iter().enumerate() {
            m[(i, j)] = self.entries[d];
            m[(j, i)] = self.entries[d];
        }
        if let Some(diag) = &self.diagonal {
            for (i, v) in diag.iter().enumerate() {
                m[(i, i)] = *v;
            }
        }
        m
    }
}

/// Class-model matrix with diagonal `M[c_i, c_i]`.
pub fn complete_class_matrix(state: &ClassState) -> AlphaMatrix {
    let diag = state.labels.iter().map(|&c| state.m_at(c, c)).collect();
    AlphaMatrix::from_kernel(state)
        .with_diagonal(diag)
        .expect("one diagonal entry per node")
}

/// Number of singular values above `tol_factor` times the largest.
pub fn numerical_rank(m: &DMatrix<f64>, tol_factor: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.singular_values();
    let largest = sv.max();
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol_factor * largest).count()
}

/// Squared-distance matrix `s 1ᵀ + 1 sᵀ − 2 Z Zᵀ` (`s_i = |z_i|²`) and its numerical rank.
///
/// `positions` is `n × K`, one point per row.
pub fn squared_distance_rank_check(positions: &DMatrix<f64>) -> (DMatrix<f64>, usize) {
    let n = positions.nrows();
    let gram = positions * positions.transpose();
    let s: Vec<f64> = (0..n).map(|i| gram[(i, i)]).collect();
    let d2 = DMatrix::from_fn(n, n, |i, j| s[i] + s[j] - 2.0 * gram[(i, j)]);
    let rank = numerical_rank(&d2, RANK_TOLERANCE);
    (d2, rank)
}

/// Lifts each point onto the sphere of radius `r` in one more dimension:
/// `u_i = (z_i, sqrt(r² − |z_i|²))`, with `Lambda = I`.
pub fn sphere_embedding(positions: &DMatrix<f64>, r: f64) -> Result<EigenState> {
    let (n, k) = positions.shape();
    let max_sq = (0..n)
        .map(|i| positions.row(i).norm_squared())
        .fold(0.0, f64::max);
    if !(r * r > max_sq) {
        return Err(Error::invalid(format!(
            "radius {r} does not exceed the largest norm {}",
            max_sq.sqrt()
        )));
    }
    let mut vectors = Vec::with_capacity(n * (k + 1));
    for i in 0..n {
        let row = positions.row(i);
        vectors.extend(row.iter());
        vectors.push(((r - row.norm()) * (r + row.norm())).sqrt());
    }
    EigenState::new(vectors, k + 1, vec![1.0; k + 1], vec![0.0; k + 1])
}

/// Kendall's tau-b between the entries of two matrices.
pub fn order_agreement(a: &AlphaMatrix, b: &AlphaMatrix) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {} nodes",
            a.n(),
            b.n()
        )));
    }
    Ok(kendall_tau_b(&a.entries, &b.entries))
}

pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let (mut concordant, mut discordant) = (0i64, 0i64);
    let (mut tied_x, mut tied_y) = (0i64, 0i64);
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = x[i].partial_cmp(&x[j]).unwrap_or(std::cmp::Ordering::Equal);
            let dy = y[i].partial_cmp(&y[j]).unwrap_or(std::cmp::Ordering::Equal);
            use std::cmp::Ordering::Equal;
            match (dx, dy) {
                (Equal, Equal) => {}
                (Equal, _) => tied_x += 1,
                (_, Equal) => tied_y += 1,
                (p, q) if p == q => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let denom = (((concordant + discordant + tied_x) as f64)
        * ((concordant + discordant + tied_y) as f64))
        .sqrt();
    if denom == 0.0 {
        return 0.0;
    }
    (concordant - discordant) as f64 / denom
}

/// Smallest radius multiple (of `max |z_i|`) among `multipliers` at which the
/// sphere embedding orders its inner products exactly like `−|z_i − z_j|`.
pub fn smallest_order_preserving_radius(
    positions: &DMatrix<f64>,
    multipliers: &[f64],
) -> Result<Option<f64>> {
    let n = positions.nrows();
    let dist = negative_distances(positions);
    let scale = (0..n).map(|i| positions.row(i).norm()).fold(0.0, f64::max);
    for &m in multipliers {
        let emb = sphere_embedding(positions, m * scale.max(f64::MIN_POSITIVE))?;
        let tau = order_agreement(&dist, &AlphaMatrix::from_kernel(&emb))?;
        if tau == 1.0 {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// `−|z_i − z_j|` for the rows of `positions`.
pub fn negative_distances(positions: &DMatrix<f64>) -> AlphaMatrix {
    let n = positions.nrows();
    let index = DyadIndex::new(n);
    let entries = index
        .pairs()
        .into_iter()
        .map(|(i, j)| -(positions.row(i) - positions.row(j)).norm())
        .collect();
    AlphaMatrix::new(n, entries).expect("sizes match")
}

/// Rank-one matrix from `Lambda = 1`, `u_1 = 1`, `u_i = r` (i > 1).
pub fn star_eigen_matrix(n: usize, r: f64) -> Result<AlphaMatrix> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::invalid(format!("r = {r} must lie in (0, 1)")));
    }
    if n < 3 {
        return Err(Error::invalid("star pattern needs at least 3 nodes"));
    }
    let mut u = vec![r; n];
    u[0] = 1.0;
    let state = EigenState::new(u, 1, vec![1.0], vec![0.0])?;
    Ok(AlphaMatrix::from_kernel(&state))
}

/// True when every `e_1i` strictly exceeds every `e_ij` with `i, j ≠ 1`
/// (node 1 is index 0).
pub fn star_ordering_holds(m: &AlphaMatrix) -> bool {
    let n = m.n();
    let hub_min = (1..n)
        .map(|i| m.get(0, i).expect("valid"))
        .fold(f64::INFINITY, f64::min);
    let rim_max = (1..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .map(|(i, j)| m.get(i, j).expect("valid"))
        .fold(f64::NEG_INFINITY, f64::max);
    hub_min > rim_max
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityResult {
    pub n: usize,
    pub k: usize,
    /// Smallest violation over all restarts.
    pub best_violation: f64,
    pub violations: Vec<f64>,
    /// Point configuration achieving `best_violation` (`n × k`, hub first).
    pub best_positions: DMatrix<f64>,
}

/// Search settings for [`distance_feasibility_search`].
#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilitySearch {
    pub restarts: usize,
    pub iterations: usize,
    pub step: f64,
    /// Required relative gap: `d_ij ≥ (1 + margin) max(d_1i, d_1j)`.
    pub margin: f64,
    pub seed: u64,
}

impl Default for FeasibilitySearch {
    fn default() -> Self {
        FeasibilitySearch {
            restarts: 200,
            iterations: 4_000,
            step: 0.02,
            margin: 0.05,
            seed: 7,
        }
    }
}

/// Hinge violation of the star ordering by points in `R^K` (hub at row 0),
/// measured relative to the largest hub distance so it is scale free.
pub fn star_violation(points: &DMatrix<f64>, margin: f64) -> f64 {
    star_violation_and_grad(points, margin, false).0
}

fn star_violation_and_grad(points: &DMatrix<f64>, margin: f64, want_grad: bool) -> (f64, DMatrix<f64>) {
    let (n, k) = points.shape();
    let mut grad = DMatrix::zeros(n, k);
    let hub: Vec<f64> = (0..n).map(|i| (points.row(i) - points.row(0)).norm()).collect();
    let scale = hub.iter().copied().fold(0.0, f64::max);
    if scale == 0.0 {
        return (f64::INFINITY, grad);
    }
    let mut loss = 0.0;
    for i in 1..n {
        for j in (i + 1)..n {
            let dij = (points.row(i) - points.row(j)).norm();
            for &a in &[i, j] {
                let v = (1.0 + margin) * hub[a] - dij;
                if v <= 0.0 {
                    continue;
                }
                loss += v / scale;
                if want_grad {
                    // scale held fixed: the caller renormalizes every step
                    if hub[a] > 0.0 {
                        let dir = (points.row(a) - points.row(0)) / hub[a];
                        let g = dir * ((1.0 + margin) / scale);
                        for c in 0..k {
                            grad[(a, c)] += g[c];
                            grad[(0, c)] -= g[c];
                        }
                    }
                    if dij > 0.0 {
                        let dir = (points.row(i) - points.row(j)) / dij;
                        for c in 0..k {
                            grad[(i, c)] -= dir[c] / scale;
                            grad[(j, c)] += dir[c] / scale;
                        }
                    }
                }
            }
        }
    }
    (loss, grad)
}

/// Multi-restart projected subgradient search for `n` points in `R^K` whose
/// distances follow the star ordering `d_1i < d_ij`. Reports the smallest
/// hinge violation found; zero means a configuration was exhibited.
pub fn distance_feasibility_search(n: usize, k: usize, search: &FeasibilitySearch) -> Result<FeasibilityResult> {
    if k == 0 || n < 3 || search.restarts == 0 {
        return Err(Error::invalid("need K ≥ 1, n ≥ 3 and at least one restart"));
    }
    let mut violations = Vec::with_capacity(search.restarts);
    let mut best = (f64::INFINITY, DMatrix::zeros(n, k));
    for restart in 0..search.restarts {
        let mut rng = RngStream::substream(search.seed, restart as u64);
        let mut pts = DMatrix::from_fn(n, k, |_, _| rng.std_normal());
        normalize(&mut pts);
        let mut run_best = (star_violation(&pts, search.margin), pts.clone());
        for it in 0..search.iterations {
            if run_best.0 == 0.0 {
                break;
            }
            let (_, grad) = star_violation_and_grad(&pts, search.margin, true);
            let step = search.step / (1.0 + it as f64 / 500.0).sqrt();
            pts -= grad * step;
            normalize(&mut pts);
            let v = star_violation(&pts, search.margin);
            if v < run_best.0 {
                run_best = (v, pts.clone());
            }
        }
        violations.push(run_best.0);
        if run_best.0 < best.0 {
            best = run_best;
        }
    }
    Ok(FeasibilityResult {
        n,
        k,
        best_violation: best.0,
        violations,
        best_positions: best.1,
    })
}

// hub to the origin, largest hub distance to 1
fn normalize(pts: &mut DMatrix<f64>) {
    let hub = pts.row(0).clone_owned();
    for mut row in pts.row_iter_mut() {
        row -= &hub;
    }
    let scale = pts.row_iter().map(|r| r.norm()).fold(0.0, f64::max);
    if scale > 0.0 {
        *pts /= scale;
    }
}

/// Settings for [`run_theory_battery`].
#[derive(Clone, Debug, PartialEq)]
pub struct BatteryConfig {
    pub class_instances: usize,
    pub seed: u64,
    pub search: FeasibilitySearch,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            class_instances: 1000,
            seed: 11,
            search: FeasibilitySearch::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatteryItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct TheoryReport {
    pub items: Vec<BatteryItem>,
}

impl TheoryReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.items.push(BatteryItem {
            name: name.to_string(),
            passed,
            detail,
        });
    }
}

impl fmt::Display for TheoryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            writeln!(
                f,
                "[{}] {}: {}",
                if item.passed { "PASS" } else { "FAIL" },
                item.name,
                item.detail
            )?;
        }
        write!(f, "overall: {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

fn random_points(n: usize, k: usize, rng: &mut RngStream) -> DMatrix<f64> {
    DMatrix::from_fn(n, k, |_, _| rng.std_normal())
}

/// Runs every representation check and collects pass/fail lines.
pub fn run_theory_battery(config: &BatteryConfig) -> Result<TheoryReport> {
    let mut report = TheoryReport::default();
    let mut rng = RngStream::substream(config.seed, 0);

    // class completions
    let mut worst = 0usize;
    let mut ok = true;
    for _ in 0..config.class_instances {
        let k = 1 + (rng.uniform_open() * 6.0) as usize;
        let n = k + 2 + (rng.uniform_open() * 30.0) as usize;
        let labels: Vec<usize> = (0..n).map(|_| ((rng.uniform_open() * k as f64) as usize).min(k - 1)).collect();
        let mut m = vec![0.0; k * k];
        for a in 0..k {
            for b in a..k {
                let v = rng.std_normal();
                m[a * k + b] = v;
                m[b * k + a] = v;
            }
        }
        let state = ClassState::new(labels, k, m, 1.0)?;
        let rank = numerical_rank(&complete_class_matrix(&state).to_full(), RANK_TOLERANCE);
        ok &= rank <= k;
        worst = worst.max(rank.saturating_sub(k));
    }
    report.push(
        "class completion rank <= K",
        ok,
        format!("{} random instances, max excess rank {worst}", config.class_instances),
    );

    // squared distances
    let mut detail = Vec::new();
    let mut ok = true;
    for k in 1..=3 {
        let (_, rank) = squared_distance_rank_check(&random_points(50, k, &mut rng));
        ok &= rank <= k + 2;
        detail.push(format!("K={k}: rank {rank}"));
    }
    report.push("squared distances rank <= K+2 (n=50)", ok, detail.join(", "));

    // sphere embedding
    let pts = random_points(20, 2, &mut rng);
    let scale = (0..20).map(|i| pts.row(i).norm()).fold(0.0, f64::max);
    let emb = sphere_embedding(&pts, 1e3 * scale)?;
    let tau = order_agreement(&negative_distances(&pts), &AlphaMatrix::from_kernel(&emb))?;
    let smallest = smallest_order_preserving_radius(&pts, &[1.01, 1.5, 2.0, 5.0, 10.0, 100.0, 1e3])?;
    report.push(
        "sphere embedding preserves distance order (n=20, K=2, r=1e3 max|z|)",
        tau == 1.0,
        format!(
            "Kendall tau {tau}; smallest tested multiple reaching tau = 1: {}",
            smallest.map_or("none".to_string(), |m| m.to_string())
        ),
    );

    // star ordering
    let mut ok = true;
    for n in 3..=50 {
        for r in (1..=9).map(|t| t as f64 / 10.0) {
            ok &= star_ordering_holds(&star_eigen_matrix(n, r)?);
        }
    }
    report.push("star eigen ordering e_1i > e_ij", ok, "n = 3..50, r = 0.1..0.9".into());

    // feasibility search
    let search = &config.search;
    let r31 = distance_feasibility_search(3, 1, search)?;
    let r62 = distance_feasibility_search(6, 2, search)?;
    let r72 = distance_feasibility_search(7, 2, search)?;
    let min72 = r72.violations.iter().copied().fold(f64::INFINITY, f64::min);
    report.push(
        "star ordering realizable by distances at (n=3, K=1)",
        r31.best_violation == 0.0,
        format!("best violation {:.3e}", r31.best_violation),
    );
    report.push(
        "star ordering realizable by distances at (n=6, K=2)",
        r62.best_violation == 0.0,
        format!("best violation {:.3e}", r62.best_violation),
    );
    report.push(
        "star ordering not found by distances at (n=7, K=2)",
        min72 > 0.0,
        format!(
            "smallest violation over {} restarts {:.4} (margin {})",
            r72.violations.len(),
            min72,
            search.margin
        ),
    );
    Ok(report)
}
