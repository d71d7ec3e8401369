//! Result documents: canonical JSON, flat CSV exports, and reading them back.

use std::fs;
use std::io::Write;
use std::path::Path;

use ordfuzz::data::MembershipMatrix;
use ordfuzz::eval::BenchmarkReport;
use ordfuzz::fuzzify::FuzzificationTable;
use serde::{Deserialize, Serialize};

use crate::config::{Engine, Format, RunConfig};
use crate::error::{CliError, Result};

pub const SCHEMA: &str = "ordfuzz/results/v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsFile {
    pub schema: String,
    pub config: RunConfig,
    pub dataset: DatasetSummary,
    pub result: Payload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub observations: usize,
    pub features: Vec<String>,
    pub levels: Vec<usize>,
    pub labelled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Payload {
    Fuzzify(FuzzifyOutput),
    Cluster(Box<ClusterOutput>),
    Benchmark(BenchmarkReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzifyOutput {
    pub tables: Vec<FuzzificationTable>,
    pub fuzzified: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterOutput {
    pub method: Engine,
    /// Final memberships; for LMFCM with the neighbour rule, after reassignment.
    pub memberships: MembershipMatrix,
    /// LMFCM memberships before neighbour reassignment, when it ran.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fuzzy_memberships: Option<MembershipMatrix>,
    pub assignment: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centroids: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_order: Option<Vec<usize>>,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coincident_clusters: Option<bool>,
    /// Best-permutation agreement with the `label` column, when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
}

impl ResultsFile {
    pub fn new(config: RunConfig, dataset: DatasetSummary, result: Payload) -> Self {
        Self { schema: SCHEMA.to_string(), config, dataset, result }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Data(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    /// CSV export of the flat part of the result, preceded by `#` lines
    /// carrying the schema and the resolved config.
    pub fn to_csv(&self) -> Result<String> {
        let config = serde_json::to_string(&self.config).map_err(|e| CliError::Data(e.to_string()))?;
        let mut out = format!("# schema: {}\n# config: {config}\n", self.schema);
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::Data(e.to_string());
        match &self.result {
            Payload::Fuzzify(f) => {
                w.write_record(&self.dataset.features).map_err(csv_err)?;
                for row in &f.fuzzified {
                    w.write_record(row.iter().map(f64::to_string)).map_err(csv_err)?;
                }
            }
            Payload::Cluster(c) => {
                let k = c.memberships.n_clusters();
                let mut header: Vec<String> = (0..k).map(|i| format!("cluster_{i}")).collect();
                header.push("assignment".into());
                w.write_record(&header).map_err(csv_err)?;
                for (row, a) in c.memberships.to_rows().iter().zip(&c.assignment) {
                    let fields = row.iter().map(f64::to_string).chain(std::iter::once(a.to_string()));
                    w.write_record(fields).map_err(csv_err)?;
                }
            }
            Payload::Benchmark(r) => {
                w.write_record(["method", "trial", "seed", "accuracy", "iterations", "error"]).map_err(csv_err)?;
                for m in &r.methods {
                    for (t, rec) in m.trials.iter().enumerate() {
                        w.write_record([
                            m.method.name().to_string(),
                            t.to_string(),
                            rec.seed.to_string(),
                            rec.accuracy.map_or_else(String::new, |a| a.to_string()),
                            rec.iterations.map_or_else(String::new, |i| i.to_string()),
                            rec.error.clone().unwrap_or_default(),
                        ])
                        .map_err(csv_err)?;
                    }
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| CliError::Data(e.to_string()))?;
        out.push_str(&String::from_utf8_lossy(&bytes));
        Ok(out)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

/// Writes `text` to `path`, or to standard output when there is no path.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

/// Reads a JSON results file.
pub fn read_results(path: &Path) -> Result<ResultsFile> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let doc: ResultsFile =
        serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    if doc.schema != SCHEMA {
        return Err(CliError::Data(format!("{}: unsupported schema {:?}", path.display(), doc.schema)));
    }
    Ok(doc)
}

/// Reads the membership matrix stored by `cluster`, in either format.
pub fn read_memberships(path: &Path) -> Result<MembershipMatrix> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    if !text.trim_start().starts_with('#') {
        return match read_results(path)?.result {
            Payload::Cluster(c) => Ok(c.memberships),
            _ => Err(CliError::Data(format!("{}: not a cluster result", path.display()))),
        };
    }
    let bad = |msg: String| CliError::Data(format!("{}: {msg}", path.display()));
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    let cols: Vec<usize> = (0..header.len()).filter(|&i| header[i].starts_with("cluster_")).collect();
    if cols.is_empty() {
        return Err(bad("no membership columns".into()));
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let row = cols
            .iter()
            .map(|&i| record[i].parse::<f64>().map_err(|e| bad(e.to_string())))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    MembershipMatrix::from_rows(&rows).map_err(|e| bad(e.to_string()))
}
