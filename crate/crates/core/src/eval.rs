//! Turning numeric data into ranks, scoring partitions against ground truth,
//! and the seeded multi-trial accuracy benchmark.

use std::time::{Duration, Instant};

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::data::{hard_assignment, OrdinalDataset};
use crate::error::{Error, Result};
use crate::fcm::{fcm_run, FcmConfig};
use crate::lmfcm::{lmfcm_run, LmfcmConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BinStrategy {
    #[default]
    Quantile,
    EqualWidth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdinalizationSpec {
    pub bins: usize,
    pub strategy: BinStrategy,
}

impl Default for OrdinalizationSpec {
    fn default() -> Self {
        Self { bins: 5, strategy: BinStrategy::Quantile }
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Ranks for one numeric column. A value equal to a bin boundary takes the
/// lower rank.
pub fn ordinalize_column(values: &[f64], spec: &OrdinalizationSpec) -> Result<Vec<u32>> {
    let m = spec.bins;
    if m < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 bins, got {m}")));
    }
    if values.is_empty() {
        return Err(Error::NoObservations);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig("non-finite value in numeric column".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    if min == max {
        log::warn!("constant feature: every observation gets rank 1");
        return Ok(vec![1; values.len()]);
    }
    let boundaries: Vec<f64> = match spec.strategy {
        BinStrategy::Quantile => {
            if values.len() < m {
                return Err(Error::InvalidConfig(format!(
                    "quantile binning into {m} bins needs at least {m} observations, got {}",
                    values.len()
                )));
            }
            (1..m).map(|r| quantile(&sorted, r as f64 / m as f64)).collect()
        }
        BinStrategy::EqualWidth => {
            let width = (max - min) / m as f64;
            (1..m).map(|r| min + width * r as f64).collect()
        }
    };
    Ok(values
        .iter()
        .map(|&v| 1 + boundaries.iter().filter(|&&b| v > b).count() as u32)
        .collect())
}

/// Bins every column of an `N × n` numeric matrix into `spec.bins` ranks.
pub fn ordinalize(numeric: ArrayView2<'_, f64>, spec: &OrdinalizationSpec) -> Result<OrdinalDataset> {
    let (n, n_features) = numeric.dim();
    let mut ranks = vec![Vec::with_capacity(n_features); n];
    for col in numeric.columns() {
        let binned = ordinalize_column(&col.to_vec(), spec)?;
        for (row, r) in ranks.iter_mut().zip(binned) {
            row.push(r);
        }
    }
    OrdinalDataset::from_ranks(&vec![spec.bins; n_features], ranks, None)
}

/// `counts[cluster][class]` for the given label vectors.
fn contingency(predicted: &[usize], truth: &[usize]) -> Vec<Vec<i64>> {
    let size = predicted
        .iter()
        .chain(truth)
        .copied()
        .max()
        .map_or(1, |m| m + 1);
    let mut counts = vec![vec![0i64; size]; size];
    for (&p, &t) in predicted.iter().zip(truth) {
        counts[p][t] += 1;
    }
    counts
}

fn check_lengths(predicted: &[usize], truth: &[usize]) -> Result<()> {
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch { predicted: predicted.len(), truth: truth.len() });
    }
    if predicted.is_empty() {
        return Err(Error::NoObservations);
    }
    Ok(())
}

/// Accuracy under the best one-to-one cluster→class mapping, found by
/// enumerating every permutation. Practical up to about 9 labels.
pub fn accuracy_exhaustive(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    check_lengths(predicted, truth)?;
    let counts = contingency(predicted, truth);
    let size = counts.len();
    let mut perm: Vec<usize> = (0..size).collect();
    let score = |perm: &[usize]| -> i64 { perm.iter().enumerate().map(|(i, &j)| counts[i][j]).sum() };
    let mut best = score(&perm);
    // Heap's algorithm, iterative form
    let mut stack = vec![0usize; size];
    let mut i = 1;
    while i < size {
        if stack[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(stack[i], i);
            }
            best = best.max(score(&perm));
            stack[i] += 1;
            i = 1;
        } else {
            stack[i] = 0;
            i += 1;
        }
    }
    Ok(best as f64 / predicted.len() as f64)
}

/// Maximum-weight perfect matching on a square matrix (Hungarian method with
/// row/column potentials, O(n³)). Returns the total weight.
fn max_weight_assignment(weights: &[Vec<i64>]) -> i64 {
    let n = weights.len();
    let top = weights.iter().flatten().copied().max().unwrap_or(0);
    // minimise top - w on 1-based arrays; column 0 is a sentinel
    let cost = |i: usize, j: usize| top - weights[i - 1][j - 1];
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=n).map(|j| weights[matched_row[j] - 1][j - 1]).sum()
}

/// Same quantity as [`accuracy_exhaustive`], solved as an assignment problem.
pub fn accuracy_assignment(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    check_lengths(predicted, truth)?;
    let best = max_weight_assignment(&contingency(predicted, truth));
    Ok(best as f64 / predicted.len() as f64)
}

/// Fraction of observations matched under the best cluster→class mapping.
pub fn accuracy(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    let labels = predicted.iter().chain(truth).copied().max().map_or(0, |m| m + 1);
    if labels <= 8 {
        accuracy_exhaustive(predicted, truth)
    } else {
        accuracy_assignment(predicted, truth)
    }
}

/// A clustering method compared by the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// FCM on integer ranks treated as real numbers.
    #[serde(rename = "fcm-on-ranks")]
    FcmRanks,
    #[serde(rename = "lmfcm")]
    Lmfcm,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::FcmRanks => "fcm-on-ranks",
            Method::Lmfcm => "lmfcm",
        }
    }
}

/// How trials are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Fan trials out over a pool of `jobs` threads. Falls back to
    /// sequential execution when the `parallel` feature is off.
    Parallel { jobs: usize },
}

impl Execution {
    pub fn with_jobs(jobs: usize) -> Self {
        if jobs <= 1 {
            Execution::Sequential
        } else {
            Execution::Parallel { jobs }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub methods: Vec<Method>,
    pub trials: usize,
    pub base_seed: u64,
    /// Engine settings; the per-trial seed overrides `seed`.
    pub fcm: FcmConfig,
    pub lmfcm: LmfcmConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub accuracy: Option<f64>,
    pub iterations: Option<usize>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: Method,
    pub avg: Option<f64>,
    pub max: Option<f64>,
    pub min: Option<f64>,
    pub failures: usize,
    pub trials: Vec<TrialRecord>,
    /// Not serialized, and ignored by equality, so that repeated runs
    /// compare and serialize identically.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl PartialEq for MethodReport {
    fn eq(&self, other: &Self) -> bool {
        self.method == other.method
            && self.avg == other.avg
            && self.max == other.max
            && self.min == other.min
            && self.failures == other.failures
            && self.trials == other.trials
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub trials: usize,
    pub base_seed: u64,
    pub methods: Vec<MethodReport>,
}

impl BenchmarkReport {
    pub fn method(&self, method: Method) -> Option<&MethodReport> {
        self.methods.iter().find(|m| m.method == method)
    }
}

fn run_trial(ds: &OrdinalDataset, truth: &[usize], method: Method, config: &BenchmarkConfig, trial: usize) -> TrialRecord {
    let seed = config.base_seed.wrapping_add(trial as u64);
    let outcome = match method {
        Method::FcmRanks => {
            let points = ds.features().ranks_as_f64();
            let cfg = FcmConfig { seed, ..config.fcm.clone() };
            fcm_run(points.view(), &cfg).map(|r| (hard_assignment(&r.memberships), r.iterations))
        }
        Method::Lmfcm => {
            let cfg = LmfcmConfig { seed, ..config.lmfcm.clone() };
            lmfcm_run(ds.features(), &cfg)
                .map(|r| (hard_assignment(r.state.memberships()), r.diagnostics.iterations))
        }
    };
    match outcome.and_then(|(assigned, iters)| Ok((accuracy(&assigned, truth)?, iters))) {
        Ok((acc, iters)) => TrialRecord { seed, accuracy: Some(acc), iterations: Some(iters), error: None },
        Err(e) => TrialRecord { seed, accuracy: None, iterations: None, error: Some(e.to_string()) },
    }
}

#[cfg(feature = "parallel")]
fn collect_trials<F>(trials: usize, exec: Execution, f: F) -> Vec<TrialRecord>
where
    F: Fn(usize) -> TrialRecord + Sync + Send,
{
    use rayon::prelude::*;
    match exec {
        Execution::Parallel { jobs } if jobs > 1 => {
            match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
                Ok(pool) => pool.install(|| (0..trials).into_par_iter().map(&f).collect()),
                Err(e) => {
                    log::warn!("could not build a {jobs}-thread pool ({e}), running sequentially");
                    (0..trials).map(f).collect()
                }
            }
        }
        _ => (0..trials).map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn collect_trials<F>(trials: usize, _exec: Execution, f: F) -> Vec<TrialRecord>
where
    F: Fn(usize) -> TrialRecord,
{
    (0..trials).map(f).collect()
}

/// Aggregates the successful trials of one method.
pub fn summarize(method: Method, trials: Vec<TrialRecord>, elapsed: Duration) -> MethodReport {
    let accs: Vec<f64> = trials.iter().filter_map(|t| t.accuracy).collect();
    let failures = trials.len() - accs.len();
    let (avg, max, min) = if accs.is_empty() {
        (None, None, None)
    } else {
        let avg = accs.iter().sum::<f64>() / accs.len() as f64;
        let max = accs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = accs.iter().copied().fold(f64::INFINITY, f64::min);
        (Some(avg), Some(max), Some(min))
    };
    MethodReport { method, avg, max, min, failures, trials, elapsed }
}

/// Runs every method for `config.trials` seeded trials (seed of trial `t` is
/// `base_seed + t`) and scores each defuzzified partition against the
/// dataset's labels. Trials that fail are recorded and left out of the
/// aggregates.
pub fn run_benchmark(ds: &OrdinalDataset, config: &BenchmarkConfig, exec: Execution) -> Result<BenchmarkReport> {
    let truth = ds
        .labels()
        .ok_or_else(|| Error::InvalidConfig("benchmark needs a labelled dataset".into()))?;
    if config.trials == 0 {
        return Err(Error::InvalidConfig("need at least one trial".into()));
    }
    let methods = config
        .methods
        .iter()
        .map(|&method| {
            let start = Instant::now();
            let trials = collect_trials(config.trials, exec, |t| run_trial(ds, truth, method, config, t));
            summarize(method, trials, start.elapsed())
        })
        .collect();
    Ok(BenchmarkReport { trials: config.trials, base_seed: config.base_seed, methods })
}
