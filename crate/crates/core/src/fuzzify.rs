//! Frequency-based fuzzification of ranks and mode-anchored membership
//! functions.
//!
//! Each rank `l` of a feature is replaced by its averaged occurrence frequency
//! `c_l = Σ_{t<l} f_t + f_l / 2`, where `f_l = N_l / N` is the rank's relative
//! frequency in the sample. The result lies in `[0, 1)` and preserves rank
//! order. Cluster prototypes are per-feature modes of those values, and each
//! mode anchors a two-segment piecewise-linear membership function.

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::data::OrdinalFeatures;
use crate::error::{Error, Result};

/// Rank frequencies for one feature, indexed by `rank - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzificationTable {
    pub counts: Vec<usize>,
    pub frequencies: Vec<f64>,
    pub averaged: Vec<f64>,
}

impl FuzzificationTable {
    /// Builds the table from raw per-rank counts.
    ///
    /// The averaging recurrence `c_1 = f_1 / 2`, `c_l = c_{l−1} + (f_{l−1} + f_l) / 2`
    /// is run on doubled integer counts and divided once at the end, so each
    /// `c_l` is correctly rounded and unaffected by empty ranks.
    pub fn from_counts(counts: Vec<usize>) -> Result<Self> {
        let total: usize = counts.iter().sum();
        if total == 0 {
            return Err(Error::NoObservations);
        }
        let n = total as f64;
        let frequencies: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
        let mut doubled = 0usize;
        let averaged = counts
            .iter()
            .enumerate()
            .map(|(l, &c)| {
                doubled += if l == 0 { c } else { counts[l - 1] + c };
                doubled as f64 / (2.0 * n)
            })
            .collect();
        Ok(Self { counts, frequencies, averaged })
    }

    pub fn levels(&self) -> usize {
        self.counts.len()
    }

    /// Averaged frequency for a 1-based rank.
    pub fn value(&self, rank: u32) -> Option<f64> {
        let idx = (rank as usize).checked_sub(1)?;
        self.averaged.get(idx).copied()
    }
}

/// Counts rank occurrences for feature `feature` and derives its table.
pub fn build_table(features: &OrdinalFeatures, feature: usize) -> Result<FuzzificationTable> {
    if features.n_obs() == 0 {
        return Err(Error::NoObservations);
    }
    let levels = features.scales()[feature].len();
    let mut counts = vec![0usize; levels];
    for &r in features.column(feature) {
        counts[r as usize - 1] += 1;
    }
    FuzzificationTable::from_counts(counts)
}

pub fn build_tables(features: &OrdinalFeatures) -> Result<Vec<FuzzificationTable>> {
    (0..features.n_features()).map(|k| build_table(features, k)).collect()
}

/// Replaces every rank with its feature's averaged frequency.
pub fn fuzzify_dataset(features: &OrdinalFeatures, tables: &[FuzzificationTable]) -> Result<Array2<f64>> {
    if tables.len() != features.n_features() {
        return Err(Error::Shape(format!(
            "{} tables for {} features",
            tables.len(),
            features.n_features()
        )));
    }
    let ranks = features.ranks();
    let mut out = Array2::zeros(ranks.dim());
    for ((obs, feature), &rank) in ranks.indexed_iter() {
        let table = &tables[feature];
        out[(obs, feature)] = table.value(rank).ok_or(Error::RankOutOfTable {
            obs,
            feature,
            rank,
            levels: table.levels(),
        })?;
    }
    Ok(out)
}

/// Which closed form a membership function uses, decided by its mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MembershipShape {
    /// Mode above one half.
    RightAnchored,
    /// Mode below one half.
    LeftAnchored,
    /// Mode exactly one half.
    Centered,
}

/// Asymmetric triangular membership function peaking at `mode`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MembershipFunction {
    mode: f64,
    shape: MembershipShape,
}

impl MembershipFunction {
    pub fn mode(&self) -> f64 {
        self.mode
    }

    pub fn shape(&self) -> MembershipShape {
        self.shape
    }

    /// Membership of `x`, clamped to `[0, 1]`.
    pub fn eval(&self, x: f64) -> f64 {
        let m = self.mode;
        let raw = match self.shape {
            MembershipShape::RightAnchored => {
                if (0.0..=m).contains(&x) {
                    x / m
                } else {
                    (2.0 * m - x) / m
                }
            }
            MembershipShape::LeftAnchored => {
                if (m..=1.0).contains(&x) {
                    (1.0 - x) / (1.0 - m)
                } else {
                    (x - 2.0 * m + 1.0) / (1.0 - m)
                }
            }
            MembershipShape::Centered => {
                if x <= m {
                    x / m
                } else {
                    (1.0 - x) / (1.0 - m)
                }
            }
        };
        raw.clamp(0.0, 1.0)
    }
}

/// Builds the membership function anchored at `mode`, which must lie in `(0, 1)`.
///
/// The comparison with one half is exact; the three forms coincide in the
/// limit so values straddling 0.5 by rounding behave the same.
pub fn build_membership_fn(mode: f64) -> Result<MembershipFunction> {
    if !(mode > 0.0 && mode < 1.0) {
        return Err(Error::ModeOutOfDomain(mode));
    }
    let shape = if mode > 0.5 {
        MembershipShape::RightAnchored
    } else if mode < 0.5 {
        MembershipShape::LeftAnchored
    } else {
        MembershipShape::Centered
    };
    Ok(MembershipFunction { mode, shape })
}

/// Distinct values of a column (ascending) plus, for every observation, the
/// index of its value in that list.
#[derive(Debug, Clone)]
pub(crate) struct ValueCodes {
    pub values: Vec<f64>,
    pub codes: Vec<usize>,
}

impl ValueCodes {
    pub fn new(column: ArrayView1<'_, f64>) -> Self {
        let mut values: Vec<f64> = column.to_vec();
        values.sort_by(f64::total_cmp);
        values.dedup();
        let codes = column
            .iter()
            .map(|x| values.binary_search_by(|v| v.total_cmp(x)).expect("value present"))
            .collect();
        Self { values, codes }
    }

    /// Value with the largest summed weight; ties go to the smaller value.
    pub fn weighted_mode<I>(&self, weights: I, scratch: &mut Vec<f64>) -> Result<f64>
    where
        I: IntoIterator<Item = f64>,
    {
        scratch.clear();
        scratch.resize(self.values.len(), 0.0);
        let mut any = false;
        for (&code, w) in self.codes.iter().zip(weights) {
            scratch[code] += w;
            any |= w > 0.0;
        }
        if !any {
            return Err(Error::EmptyCluster);
        }
        let mut best = 0;
        for (i, &s) in scratch.iter().enumerate().skip(1) {
            if s > scratch[best] {
                best = i;
            }
        }
        Ok(self.values[best])
    }
}

/// The value whose observations carry the most total weight. Ties resolve
/// toward the smaller value.
pub fn weighted_mode(values: ArrayView1<'_, f64>, weights: ArrayView1<'_, f64>) -> Result<f64> {
    if values.len() != weights.len() {
        return Err(Error::Shape(format!(
            "{} values but {} weights",
            values.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|&w| w < 0.0) {
        return Err(Error::Shape("negative weight".into()));
    }
    ValueCodes::new(values).weighted_mode(weights.iter().copied(), &mut Vec::new())
}
