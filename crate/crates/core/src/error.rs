use thiserror::Error;

use crate::data::Violation;

/// Errors produced by the clustering engines and their supporting routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid rank scale: {0}")]
    InvalidScale(String),

    #[error("invalid dataset: {}", format_violations(.0))]
    InvalidDataset(Vec<Violation>),

    #[error("no observations")]
    NoObservations,

    #[error("rank {rank} at observation {obs}, feature {feature} is outside the table range 1..={levels}")]
    RankOutOfTable {
        obs: usize,
        feature: usize,
        rank: u32,
        levels: usize,
    },

    #[error("mode out of domain: {0} is not in (0, 1)")]
    ModeOutOfDomain(f64),

    #[error("empty cluster")]
    EmptyCluster,

    #[error("degenerate cluster {0}")]
    DegenerateCluster(usize),

    #[error("probability must be positive, got {0}")]
    NonPositiveProbability(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("length mismatch: predicted has {predicted} entries, truth has {truth}")]
    LengthMismatch { predicted: usize, truth: usize },

    #[error("clustering failed after {attempts} attempts: {last}")]
    RestartsExhausted { attempts: usize, last: Box<Error> },
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
