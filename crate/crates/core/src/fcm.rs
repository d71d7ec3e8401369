//! Classic fuzzy c-means over real-valued points.
//!
//! Alternates the closed-form membership update for fixed centroids with the
//! weighted-mean centroid update for fixed memberships. Each half-step
//! minimises `Q = Σ_i Σ_j w_ij^β ‖x_j − v_i‖²` over its own block, so the
//! recorded objective never increases.

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::MembershipMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FcmConfig {
    pub clusters: usize,
    pub beta: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for FcmConfig {
    fn default() -> Self {
        Self { clusters: 2, beta: 2.0, epsilon: 1e-4, max_iters: 300, seed: 0 }
    }
}

impl FcmConfig {
    pub fn validate(&self, n_obs: usize) -> Result<()> {
        if self.clusters < 2 {
            return Err(Error::InvalidConfig(format!("need at least 2 clusters, got {}", self.clusters)));
        }
        if self.clusters > n_obs {
            return Err(Error::InvalidConfig(format!(
                "{} clusters requested for {n_obs} observations",
                self.clusters
            )));
        }
        // the membership exponent 2/(β−1) needs β > 1
        if !(self.beta > 1.0) || !self.beta.is_finite() {
            return Err(Error::InvalidConfig(format!("fuzzifier must exceed 1, got {}", self.beta)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidConfig(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FcmResult {
    pub memberships: MembershipMatrix,
    #[serde(serialize_with = "crate::serde_rows")]
    pub centroids: Array2<f64>,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn squared_distance(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Optimal memberships for fixed centroids.
///
/// A point lying exactly on a centroid belongs to it crisply (first such
/// centroid when several coincide).
pub fn fcm_memberships(points: ArrayView2<'_, f64>, centroids: ArrayView2<'_, f64>, beta: f64) -> MembershipMatrix {
    let c = centroids.nrows();
    let exponent = 1.0 / (beta - 1.0);
    let mut w = Array2::zeros((points.nrows(), c));
    let mut d2 = vec![0.0; c];
    for (point, mut row) in points.outer_iter().zip(w.outer_iter_mut()) {
        for (d, v) in d2.iter_mut().zip(centroids.outer_iter()) {
            *d = squared_distance(point, v);
        }
        if let Some(hit) = d2.iter().position(|&d| d == 0.0) {
            row[hit] = 1.0;
            continue;
        }
        for i in 0..c {
            let s: f64 = d2.iter().map(|&dl| (d2[i] / dl).powf(exponent)).sum();
            row[i] = 1.0 / s;
        }
    }
    MembershipMatrix::new_unchecked(w)
}

/// Weighted means `v_i = Σ_j w_ij^β x_j / Σ_j w_ij^β`.
pub fn fcm_centroids(points: ArrayView2<'_, f64>, w: &MembershipMatrix, beta: f64) -> Result<Array2<f64>> {
    if points.nrows() != w.n_obs() {
        return Err(Error::Shape(format!("{} points but {} membership rows", points.nrows(), w.n_obs())));
    }
    let powered = w.as_array().mapv(|x| x.powf(beta));
    let mut centroids = powered.t().dot(&points);
    for (i, (mut v, total)) in centroids
        .outer_iter_mut()
        .zip(powered.sum_axis(Axis(0)))
        .enumerate()
    {
        if !(total > 0.0) {
            return Err(Error::DegenerateCluster(i));
        }
        v /= total;
    }
    Ok(centroids)
}

/// `Q = Σ_i Σ_j w_ij^β ‖x_j − v_i‖²`.
pub fn fcm_objective(points: ArrayView2<'_, f64>, centroids: ArrayView2<'_, f64>, w: &MembershipMatrix, beta: f64) -> f64 {
    let mut q = 0.0;
    for (point, row) in points.outer_iter().zip(w.as_array().outer_iter()) {
        for (v, &wij) in centroids.outer_iter().zip(row.iter()) {
            if wij > 0.0 {
                q += wij.powf(beta) * squared_distance(point, v);
            }
        }
    }
    q
}

/// Random row-stochastic `n × c` matrix.
pub(crate) fn random_memberships<R: Rng>(rng: &mut R, n: usize, c: usize) -> MembershipMatrix {
    let mut w = Array2::from_shape_simple_fn((n, c), || rng.random::<f64>() + f64::EPSILON);
    for mut row in w.outer_iter_mut() {
        let s = row.sum();
        row /= s;
    }
    MembershipMatrix::new_unchecked(w)
}

/// Runs FCM from a seeded random partition until the largest membership
/// change drops below `epsilon` or `max_iters` sweeps have run.
pub fn fcm_run(points: ArrayView2<'_, f64>, config: &FcmConfig) -> Result<FcmResult> {
    config.validate(points.nrows())?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut w = random_memberships(&mut rng, points.nrows(), config.clusters);
    let mut centroids = fcm_centroids(points, &w, config.beta)?;
    let mut objective_trace = vec![fcm_objective(points, centroids.view(), &w, config.beta)];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < config.max_iters {
        iterations += 1;
        let next = fcm_memberships(points, centroids.view(), config.beta);
        let delta = next.max_abs_diff(&w);
        w = next;
        centroids = fcm_centroids(points, &w, config.beta)?;
        objective_trace.push(fcm_objective(points, centroids.view(), &w, config.beta));
        if delta < config.epsilon {
            converged = true;
            break;
        }
    }
    log::debug!("fcm: {iterations} iterations, converged = {converged}");
    Ok(FcmResult { memberships: w, centroids, objective_trace, iterations, converged })
}
