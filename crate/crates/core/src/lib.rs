//! Fuzzy clustering of ordinal-scale data.
//!
//! Ranks are mapped to averaged occurrence frequencies ([`fuzzify`]), and
//! clusters are found by sharing mode-anchored membership functions as
//! per-feature likelihoods ([`lmfcm`]). A classic fuzzy c-means baseline
//! ([`fcm`]) and a seeded accuracy benchmark ([`eval`]) are included.
//!
//! ```
//! use ordfuzz::{data::{hard_assignment, OrdinalDataset}, lmfcm::{lmfcm_run, LmfcmConfig}};
//!
//! let ranks = vec![vec![1, 1], vec![1, 1], vec![3, 3], vec![3, 3]];
//! let ds = OrdinalDataset::from_ranks(&[3, 3], ranks, None).unwrap();
//! let run = lmfcm_run(ds.features(), &LmfcmConfig::default()).unwrap();
//! let hard = hard_assignment(run.state.memberships());
//! assert_eq!(hard[0], hard[1]);
//! assert_ne!(hard[0], hard[2]);
//! ```

// `!(x > 0.0)` is used on purpose throughout: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod datasets;
pub mod error;
pub mod eval;
pub mod fcm;
pub mod fuzzify;
pub mod lmfcm;

pub use error::{Error, Result};

/// Serializes a 2-D array as a list of rows.
pub(crate) fn serde_rows<S: serde::Serializer>(a: &ndarray::Array2<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(a.nrows()))?;
    for row in a.outer_iter() {
        seq.serialize_element(&row.to_vec())?;
    }
    seq.end()
}
