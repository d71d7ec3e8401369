//! Likelihood/membership-sharing fuzzy clustering of ordinal data.
//!
//! Ranks are first fuzzified into averaged occurrence frequencies. Each
//! cluster is described by a per-feature mode, and the membership function
//! anchored at that mode gives the conditional probability `p_ijk` of
//! observation `j`'s `k`-th value under cluster `i`. Features are treated as
//! independent, so the likelihood is the product over features and the
//! dissimilarity `U_ij = −Σ_k ln p_ijk` plays the role FCM gives to squared
//! distance. Memberships follow the FCM-form update
//! `w_ij = 1 / Σ_l (U_ij / U_lj)^{1/(β−1)}`.
//!
//! After convergence an optional terminal pass restricts each observation to
//! its nearest cluster and that cluster's closer neighbour in the cluster
//! ordering, weighted by inverse squared distance to the mode vectors.

use ndarray::{Array2, Array3, ArrayView1, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{MembershipMatrix, OrdinalFeatures};
use crate::error::{Error, Result};
use crate::fuzzify::{build_membership_fn, build_tables, fuzzify_dataset, FuzzificationTable, ValueCodes};

/// Bound on fresh initialisations after a degenerate partition.
pub const MAX_RESTARTS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmfcmConfig {
    pub clusters: usize,
    pub beta: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub seed: u64,
    /// Lower bound applied to every conditional probability so that
    /// `−ln p` stays finite.
    pub p_floor: f64,
    /// Apply the two-nearest-cluster reassignment after convergence.
    pub neighbor_rule: bool,
}

impl Default for LmfcmConfig {
    fn default() -> Self {
        Self {
            clusters: 2,
            beta: 2.0,
            epsilon: 1e-4,
            max_iters: 300,
            seed: 0,
            p_floor: 1e-6,
            neighbor_rule: true,
        }
    }
}

impl LmfcmConfig {
    pub fn validate(&self, n_obs: usize) -> Result<()> {
        if self.clusters == 0 {
            return Err(Error::InvalidConfig("need at least one cluster".into()));
        }
        if self.clusters > n_obs {
            return Err(Error::InvalidConfig(format!(
                "{} clusters requested for {n_obs} observations",
                self.clusters
            )));
        }
        if !(self.beta > 1.0) || !self.beta.is_finite() {
            return Err(Error::InvalidConfig(format!("fuzzifier must exceed 1, got {}", self.beta)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidConfig(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be positive".into()));
        }
        if !(self.p_floor > 0.0 && self.p_floor <= 1e-3) {
            return Err(Error::InvalidConfig(format!("p_floor must lie in (0, 1e-3], got {}", self.p_floor)));
        }
        Ok(())
    }
}

/// Product of per-feature probabilities.
pub fn likelihood(p_row: &[f64]) -> Result<f64> {
    let mut l = 1.0;
    for &p in p_row {
        if !(p > 0.0) {
            return Err(Error::NonPositiveProbability(p));
        }
        l *= p;
    }
    Ok(l)
}

/// Negative log-likelihood, summed per feature to avoid underflow.
pub fn dissimilarity(p_row: &[f64]) -> Result<f64> {
    let mut u = 0.0;
    for &p in p_row {
        if !(p > 0.0) {
            return Err(Error::NonPositiveProbability(p));
        }
        u -= p.ln();
    }
    Ok(u)
}

/// Memberships from a `c × N` dissimilarity matrix. An observation with zero
/// dissimilarity to some cluster is assigned to it crisply (smallest index
/// on ties).
pub fn lmfcm_memberships(u: ArrayView2<'_, f64>, beta: f64) -> MembershipMatrix {
    let (c, n) = u.dim();
    let exponent = 1.0 / (beta - 1.0);
    let mut w = Array2::zeros((n, c));
    for (col, mut row) in u.axis_iter(Axis(1)).zip(w.outer_iter_mut()) {
        if let Some(hit) = col.iter().position(|&x| x == 0.0) {
            row[hit] = 1.0;
            continue;
        }
        for i in 0..c {
            let s: f64 = col.iter().map(|&ul| (col[i] / ul).powf(exponent)).sum();
            row[i] = 1.0 / s;
        }
    }
    MembershipMatrix::new_unchecked(w)
}

/// `Q = Σ_i Σ_j w_ij^β U_ij` with `U` shaped `c × N` and `w` shaped `N × c`.
pub fn objective(u: ArrayView2<'_, f64>, w: &MembershipMatrix, beta: f64) -> f64 {
    let w = w.as_array();
    let mut q = 0.0;
    for ((i, j), &uij) in u.indexed_iter() {
        let wij = w[(j, i)];
        if wij > 0.0 {
            q += wij.powf(beta) * uij;
        }
    }
    q
}

/// Per-feature value codes of a fuzzified matrix, computed once per run.
struct Columns {
    codes: Vec<ValueCodes>,
}

impl Columns {
    fn new(fuzzified: ArrayView2<'_, f64>) -> Self {
        Self { codes: fuzzified.axis_iter(Axis(1)).map(ValueCodes::new).collect() }
    }

    /// Weighted modes (`c × n`) for the given partition.
    fn modes(&self, w: &MembershipMatrix) -> Result<Array2<f64>> {
        let c = w.n_clusters();
        let mut modes = Array2::zeros((c, self.codes.len()));
        let mut scratch = Vec::new();
        for (i, weights) in w.as_array().axis_iter(Axis(1)).enumerate() {
            for (k, codes) in self.codes.iter().enumerate() {
                modes[(i, k)] = codes.weighted_mode(weights.iter().copied(), &mut scratch)?;
            }
        }
        Ok(modes)
    }
}

fn probabilities_from_modes(fuzzified: ArrayView2<'_, f64>, modes: ArrayView2<'_, f64>, p_floor: f64) -> Result<Array3<f64>> {
    let (c, n_features) = modes.dim();
    let n = fuzzified.nrows();
    let mut p = Array3::zeros((c, n, n_features));
    for i in 0..c {
        for k in 0..n_features {
            let mu = build_membership_fn(modes[(i, k)])?;
            for j in 0..n {
                p[(i, j, k)] = mu.eval(fuzzified[(j, k)]).max(p_floor);
            }
        }
    }
    Ok(p)
}

/// Recomputes cluster modes from `w` and the conditional probabilities they
/// induce. Returns `(p, modes)` with `p` shaped `c × N × n` and `modes`
/// shaped `c × n`.
pub fn update_probabilities(fuzzified: ArrayView2<'_, f64>, w: &MembershipMatrix, p_floor: f64) -> Result<(Array3<f64>, Array2<f64>)> {
    if fuzzified.nrows() != w.n_obs() {
        return Err(Error::Shape(format!(
            "{} observations but {} membership rows",
            fuzzified.nrows(),
            w.n_obs()
        )));
    }
    let modes = Columns::new(fuzzified).modes(w)?;
    let p = probabilities_from_modes(fuzzified, modes.view(), p_floor)?;
    Ok((p, modes))
}

/// `U_ij = −Σ_k ln p_ijk` for every cluster and observation.
pub fn dissimilarities(p: &Array3<f64>) -> Result<Array2<f64>> {
    let (c, n, _) = p.dim();
    let mut u = Array2::zeros((c, n));
    for i in 0..c {
        for j in 0..n {
            let row = p.slice(ndarray::s![i, j, ..]);
            u[(i, j)] = dissimilarity(row.as_slice().expect("standard layout"))?;
        }
    }
    Ok(u)
}

/// Clusters sorted by the mean of their mode vector (ties by index).
/// `order[pos]` is the cluster at position `pos`.
pub fn cluster_order(modes: ArrayView2<'_, f64>) -> Vec<usize> {
    let keys: Vec<f64> = modes
        .outer_iter()
        .map(|m| m.mean().unwrap_or(0.0))
        .collect();
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]).then(a.cmp(&b)));
    order
}

/// Membership of one observation over at most two order-adjacent clusters.
///
/// The nearest mode vector `i` and the closer of its neighbours in
/// `order` share the weight in proportion to inverse squared distance.
/// Returns `(cluster, weight)` pairs, nearest first.
pub fn neighbor_reassign(x: ArrayView1<'_, f64>, modes: ArrayView2<'_, f64>, order: &[usize]) -> Result<Vec<(usize, f64)>> {
    let c = modes.nrows();
    if c < 2 {
        return Err(Error::InvalidConfig("neighbour reassignment needs at least 2 clusters".into()));
    }
    if order.len() != c {
        return Err(Error::Shape(format!("cluster order has {} entries for {c} clusters", order.len())));
    }
    let dist: Vec<f64> = modes
        .outer_iter()
        .map(|v| v.iter().zip(x.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
        .collect();
    let mut nearest_pos = 0;
    for pos in 1..c {
        if dist[order[pos]] < dist[order[nearest_pos]] {
            nearest_pos = pos;
        }
    }
    let nearest = order[nearest_pos];
    let neighbour = match (nearest_pos.checked_sub(1), order.get(nearest_pos + 1)) {
        (Some(lo), Some(&hi)) => {
            if dist[order[lo]] <= dist[hi] {
                order[lo]
            } else {
                hi
            }
        }
        (Some(lo), None) => order[lo],
        (None, Some(&hi)) => hi,
        (None, None) => unreachable!("c >= 2"),
    };
    let d_near = dist[nearest];
    let d_next = dist[neighbour];
    if d_near == 0.0 {
        return Ok(vec![(nearest, 1.0)]);
    }
    let a = d_near.powi(-2);
    let b = d_next.powi(-2);
    Ok(vec![(nearest, a / (a + b)), (neighbour, b / (a + b))])
}

/// Iteration bookkeeping for one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub iterations: usize,
    pub converged: bool,
    pub restarts: usize,
    /// Some clusters ended with identical mode vectors.
    pub coincident_clusters: bool,
    /// Objective after each membership update of the final attempt.
    pub objective_trace: Vec<f64>,
    /// Largest membership change per iteration of the final attempt.
    pub delta_trace: Vec<f64>,
}

/// Final partition state of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct LmfcmState {
    /// `c × N × n` conditional probabilities behind `dissimilarities`.
    pub probabilities: Array3<f64>,
    /// `c × N`.
    pub dissimilarities: Array2<f64>,
    /// Converged fuzzy memberships, before any reassignment.
    pub fuzzy_memberships: MembershipMatrix,
    /// Memberships after the neighbour pass, when enabled.
    pub reassigned: Option<MembershipMatrix>,
    /// `c × n` per-feature modes, each an attained fuzzified value.
    pub modes: Array2<f64>,
    pub cluster_order: Vec<usize>,
}

impl LmfcmState {
    /// The partition to defuzzify: reassigned if available, else fuzzy.
    pub fn memberships(&self) -> &MembershipMatrix {
        self.reassigned.as_ref().unwrap_or(&self.fuzzy_memberships)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmfcmRun {
    pub tables: Vec<FuzzificationTable>,
    pub fuzzified: Array2<f64>,
    pub state: LmfcmState,
    pub diagnostics: Diagnostics,
}

/// A cluster whose mode vector equals that of a lower-indexed cluster. Two
/// such clusters receive identical memberships from then on.
fn duplicate_cluster(modes: ArrayView2<'_, f64>) -> Option<usize> {
    (1..modes.nrows()).find(|&i| (0..i).any(|l| modes.row(i) == modes.row(l)))
}

struct Attempt {
    probabilities: Array3<f64>,
    dissimilarities: Array2<f64>,
    memberships: MembershipMatrix,
    modes: Array2<f64>,
    iterations: usize,
    converged: bool,
    objective_trace: Vec<f64>,
    delta_trace: Vec<f64>,
}

fn attempt<R: Rng>(
    fuzzified: ArrayView2<'_, f64>,
    columns: &Columns,
    config: &LmfcmConfig,
    rng: &mut R,
    allow_coincident: bool,
) -> Result<Attempt> {
    let (n, n_features) = fuzzified.dim();
    let c = config.clusters;
    let mut probabilities =
        Array3::from_shape_simple_fn((c, n, n_features), || rng.random_range(config.p_floor..=1.0));
    let mut dissimilarities = dissimilarities(&probabilities)?;
    let mut w = lmfcm_memberships(dissimilarities.view(), config.beta);
    let mut modes = Array2::zeros((c, n_features));
    let mut objective_trace = Vec::new();
    let mut delta_trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < config.max_iters {
        iterations += 1;
        if let Some(i) = w.empty_cluster() {
            return Err(Error::DegenerateCluster(i));
        }
        modes = columns.modes(&w)?;
        if !allow_coincident {
            if let Some(i) = duplicate_cluster(modes.view()) {
                return Err(Error::DegenerateCluster(i));
            }
        }
        probabilities = probabilities_from_modes(fuzzified, modes.view(), config.p_floor)?;
        dissimilarities = self::dissimilarities(&probabilities)?;
        let next = lmfcm_memberships(dissimilarities.view(), config.beta);
        let delta = next.max_abs_diff(&w);
        w = next;
        objective_trace.push(objective(dissimilarities.view(), &w, config.beta));
        delta_trace.push(delta);
        if delta <= config.epsilon {
            converged = true;
            break;
        }
    }
    if let Some(i) = w.empty_cluster() {
        return Err(Error::DegenerateCluster(i));
    }
    Ok(Attempt {
        probabilities,
        dissimilarities,
        memberships: w,
        modes,
        iterations,
        converged,
        objective_trace,
        delta_trace,
    })
}

/// Fuzzifies `features` and clusters them.
///
/// Deterministic for a given config. A cluster that empties out, or whose
/// modes coincide with another cluster's, triggers a fresh initialisation
/// from the same random stream, up to [`MAX_RESTARTS`] times. The final
/// attempt accepts coincident clusters and flags them in the diagnostics;
/// an empty cluster on the final attempt is an error.
pub fn lmfcm_run(features: &OrdinalFeatures, config: &LmfcmConfig) -> Result<LmfcmRun> {
    config.validate(features.n_obs())?;
    let tables = build_tables(features)?;
    let fuzzified = fuzzify_dataset(features, &tables)?;
    let columns = Columns::new(fuzzified.view());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut restarts = 0;
    let found = loop {
        let last_chance = restarts == MAX_RESTARTS;
        match attempt(fuzzified.view(), &columns, config, &mut rng, last_chance) {
            Ok(found) => break found,
            Err(err @ (Error::DegenerateCluster(_) | Error::EmptyCluster)) => {
                if restarts == MAX_RESTARTS {
                    return Err(Error::RestartsExhausted { attempts: restarts + 1, last: Box::new(err) });
                }
                restarts += 1;
                log::debug!("lmfcm: {err}, restarting ({restarts}/{MAX_RESTARTS})");
            }
            Err(err) => return Err(err),
        }
    };

    let coincident_clusters = duplicate_cluster(found.modes.view()).is_some();
    let order = cluster_order(found.modes.view());
    let reassigned = if config.neighbor_rule && config.clusters >= 2 {
        let mut w = Array2::zeros((features.n_obs(), config.clusters));
        for (x, mut row) in fuzzified.outer_iter().zip(w.outer_iter_mut()) {
            for (i, wi) in neighbor_reassign(x, found.modes.view(), &order)? {
                row[i] = wi;
            }
        }
        Some(MembershipMatrix::new_unchecked(w))
    } else {
        None
    };

    Ok(LmfcmRun {
        tables,
        fuzzified,
        state: LmfcmState {
            probabilities: found.probabilities,
            dissimilarities: found.dissimilarities,
            fuzzy_memberships: found.memberships,
            reassigned,
            modes: found.modes,
            cluster_order: order,
        },
        diagnostics: Diagnostics {
            iterations: found.iterations,
            converged: found.converged,
            restarts,
            coincident_clusters,
            objective_trace: found.objective_trace,
            delta_trace: found.delta_trace,
        },
    })
}
