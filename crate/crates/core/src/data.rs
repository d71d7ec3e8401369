//! Data model shared by every engine: rank scales, ordinal datasets and
//! membership matrices.
//!
//! Ranks are 1-based everywhere in the public surface. A feature with an
//! `m`-level scale accepts ranks `1..=m`; scales may differ per feature.

use std::collections::HashMap;
use std::fmt;

use ndarray::{Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when checking that membership rows sum to one.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// An ordered list of category labels. The rank of a label is its 1-based
/// position in the list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankScale {
    levels: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, u32>,
}

impl RankScale {
    pub fn new<I, S>(levels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let levels: Vec<String> = levels.into_iter().map(Into::into).collect();
        if levels.is_empty() {
            return Err(Error::InvalidScale("a scale needs at least one level".into()));
        }
        let mut index = HashMap::with_capacity(levels.len());
        for (pos, level) in levels.iter().enumerate() {
            if index.insert(level.clone(), pos as u32 + 1).is_some() {
                return Err(Error::InvalidScale(format!("duplicate level {level:?}")));
            }
        }
        Ok(Self { levels, index })
    }

    /// Scale whose labels are the rank numbers themselves, `"1" < "2" < … < "m"`.
    pub fn numeric(m: usize) -> Result<Self> {
        Self::new((1..=m).map(|r| r.to_string()))
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    pub fn rank(&self, label: &str) -> Option<u32> {
        self.index.get(label).copied()
    }

    pub fn label(&self, rank: u32) -> Option<&str> {
        let pos = usize::try_from(rank).ok()?.checked_sub(1)?;
        self.levels.get(pos).map(String::as_str)
    }
}

/// A broken dataset invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoObservations,
    NoFeatures,
    NameCount { names: usize, features: usize },
    RaggedRow { obs: usize, len: usize, expected: usize },
    RankOutOfRange { obs: usize, feature: usize, rank: u32, levels: usize },
    LabelLength { labels: usize, observations: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoObservations => write!(f, "dataset has no observations"),
            Violation::NoFeatures => write!(f, "dataset has no features"),
            Violation::NameCount { names, features } => {
                write!(f, "{names} feature names given for {features} features")
            }
            Violation::RaggedRow { obs, len, expected } => {
                write!(f, "observation {obs} has {len} values, expected {expected}")
            }
            Violation::RankOutOfRange { obs, feature, rank, levels } => write!(
                f,
                "rank {rank} at observation {obs}, feature {feature} is outside 1..={levels}"
            ),
            Violation::LabelLength { labels, observations } => {
                write!(f, "{labels} labels given for {observations} observations")
            }
        }
    }
}

/// Unvalidated dataset components, as read from a file or built by hand.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatasetParts {
    pub names: Vec<String>,
    pub scales: Vec<RankScale>,
    /// One row per observation, 1-based ranks.
    pub ranks: Vec<Vec<u32>>,
    pub labels: Option<Vec<usize>>,
}

/// Checks every dataset invariant and reports each one that is broken.
pub fn validate_dataset(parts: &DatasetParts) -> Vec<Violation> {
    let mut out = Vec::new();
    let n_features = parts.scales.len();
    if parts.ranks.is_empty() {
        out.push(Violation::NoObservations);
    }
    if n_features == 0 {
        out.push(Violation::NoFeatures);
    }
    if !parts.names.is_empty() && parts.names.len() != n_features {
        out.push(Violation::NameCount { names: parts.names.len(), features: n_features });
    }
    for (obs, row) in parts.ranks.iter().enumerate() {
        if row.len() != n_features {
            out.push(Violation::RaggedRow { obs, len: row.len(), expected: n_features });
            continue;
        }
        for (feature, (&rank, scale)) in row.iter().zip(&parts.scales).enumerate() {
            if rank < 1 || rank as usize > scale.len() {
                out.push(Violation::RankOutOfRange { obs, feature, rank, levels: scale.len() });
            }
        }
    }
    if let Some(labels) = &parts.labels {
        if labels.len() != parts.ranks.len() {
            out.push(Violation::LabelLength {
                labels: labels.len(),
                observations: parts.ranks.len(),
            });
        }
    }
    out
}

/// Validated ordinal feature data: `N` observations by `n` features, without
/// ground-truth labels. This is what the clustering engines consume.
#[derive(Debug, Clone, PartialEq)]
pub struct OrdinalFeatures {
    names: Vec<String>,
    scales: Vec<RankScale>,
    ranks: Array2<u32>,
}

impl OrdinalFeatures {
    pub fn n_obs(&self) -> usize {
        self.ranks.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.ranks.ncols()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn scales(&self) -> &[RankScale] {
        &self.scales
    }

    pub fn ranks(&self) -> &Array2<u32> {
        &self.ranks
    }

    pub fn column(&self, feature: usize) -> ArrayView1<'_, u32> {
        self.ranks.column(feature)
    }

    /// Ranks as plain numbers, the representation rank-naive methods use.
    pub fn ranks_as_f64(&self) -> Array2<f64> {
        self.ranks.mapv(f64::from)
    }
}

/// An ordinal dataset with optional ground-truth class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct OrdinalDataset {
    features: OrdinalFeatures,
    labels: Option<Vec<usize>>,
}

impl OrdinalDataset {
    pub fn from_parts(parts: DatasetParts) -> Result<Self> {
        let violations = validate_dataset(&parts);
        if !violations.is_empty() {
            return Err(Error::InvalidDataset(violations));
        }
        let DatasetParts { names, scales, ranks, labels } = parts;
        let names = if names.is_empty() {
            (1..=scales.len()).map(|k| format!("f{k}")).collect()
        } else {
            names
        };
        let n = scales.len();
        let flat: Vec<u32> = ranks.iter().flatten().copied().collect();
        let ranks = Array2::from_shape_vec((ranks.len(), n), flat)
            .expect("row lengths validated above");
        Ok(Self { features: OrdinalFeatures { names, scales, ranks }, labels })
    }

    /// Convenience constructor over numeric scales `1..=m_k`.
    pub fn from_ranks(levels: &[usize], ranks: Vec<Vec<u32>>, labels: Option<Vec<usize>>) -> Result<Self> {
        let scales = levels.iter().map(|&m| RankScale::numeric(m)).collect::<Result<_>>()?;
        Self::from_parts(DatasetParts { names: Vec::new(), scales, ranks, labels })
    }

    /// Attaches ground-truth labels, one per observation.
    pub fn with_labels(self, labels: Vec<usize>) -> Result<Self> {
        Self::from_parts(DatasetParts { labels: Some(labels), ..self.to_parts() })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_features() {
            return Err(Error::InvalidDataset(vec![Violation::NameCount {
                names: names.len(),
                features: self.n_features(),
            }]));
        }
        self.features.names = names;
        Ok(self)
    }

    /// Label-free view handed to the clustering engines.
    pub fn features(&self) -> &OrdinalFeatures {
        &self.features
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn n_obs(&self) -> usize {
        self.features.n_obs()
    }

    pub fn n_features(&self) -> usize {
        self.features.n_features()
    }

    /// Decomposes back into parts; `validate_dataset` on the result is empty.
    pub fn to_parts(&self) -> DatasetParts {
        DatasetParts {
            names: self.features.names.clone(),
            scales: self.features.scales.clone(),
            ranks: self.features.ranks.outer_iter().map(|r| r.to_vec()).collect(),
            labels: self.labels.clone(),
        }
    }
}

/// `N × c` fuzzy partition. Entries are nonnegative and each row sums to one.
///
/// Serializes as a list of rows; deserializing re-checks the invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<f64>>", try_from = "Vec<Vec<f64>>")]
pub struct MembershipMatrix {
    w: Array2<f64>,
}

impl From<MembershipMatrix> for Vec<Vec<f64>> {
    fn from(m: MembershipMatrix) -> Self {
        m.to_rows()
    }
}

impl TryFrom<Vec<Vec<f64>>> for MembershipMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl MembershipMatrix {
    /// Checks nonnegativity and row sums. Clusters may be empty; engines that
    /// need every cluster populated call [`MembershipMatrix::empty_cluster`].
    pub fn new(w: Array2<f64>) -> Result<Self> {
        if w.ncols() == 0 {
            return Err(Error::Shape("membership matrix needs at least one cluster".into()));
        }
        for (j, row) in w.outer_iter().enumerate() {
            if row.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                return Err(Error::Shape(format!("row {j} has a negative or non-finite entry")));
            }
            let sum: f64 = row.sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::Shape(format!("row {j} sums to {sum}")));
            }
        }
        Ok(Self { w })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != c) {
            return Err(Error::Shape("ragged membership rows".into()));
        }
        let flat = rows.iter().flatten().copied().collect();
        let w = Array2::from_shape_vec((rows.len(), c), flat).map_err(|e| Error::Shape(e.to_string()))?;
        Self::new(w)
    }

    pub(crate) fn new_unchecked(w: Array2<f64>) -> Self {
        debug_assert!(w.outer_iter().all(|r| (r.sum() - 1.0).abs() <= 1e-6));
        Self { w }
    }

    pub fn n_obs(&self) -> usize {
        self.w.nrows()
    }

    pub fn n_clusters(&self) -> usize {
        self.w.ncols()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.w
    }

    pub fn into_array(self) -> Array2<f64> {
        self.w
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.w.outer_iter().map(|r| r.to_vec()).collect()
    }

    /// First cluster whose total membership is zero, if any.
    pub fn empty_cluster(&self) -> Option<usize> {
        self.w
            .sum_axis(Axis(0))
            .iter()
            .position(|&s| s <= 0.0)
    }

    /// Largest absolute entrywise difference between two partitions of equal shape.
    pub fn max_abs_diff(&self, other: &MembershipMatrix) -> f64 {
        self.w
            .iter()
            .zip(other.w.iter())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Index of the largest entry, ties resolved toward the smaller index.
pub(crate) fn argmax(row: ArrayView1<'_, f64>) -> usize {
    let mut best = 0;
    for (i, &x) in row.iter().enumerate().skip(1) {
        if x > row[best] {
            best = i;
        }
    }
    best
}

/// Defuzzifies each row to its highest-membership cluster (0-based), ties
/// going to the smallest cluster index.
pub fn hard_assignment(w: &MembershipMatrix) -> Vec<usize> {
    w.w.outer_iter().map(argmax).collect()
}
