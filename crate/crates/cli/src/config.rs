//! Command-line arguments and the resolved configuration embedded in every
//! output file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ordfuzz::eval::{BinStrategy, OrdinalizationSpec};
use ordfuzz::fcm::FcmConfig;
use ordfuzz::lmfcm::LmfcmConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "ordfuzz", version, about = "Fuzzy clustering of ordinal-scale data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit per-feature frequency tables and the fuzzified data matrix.
    Fuzzify {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Cluster a dataset once.
    Cluster {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum, default_value_t = Engine::Lmfcm)]
        method: Engine,
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Score seeded trials against the dataset's `label` column.
    Benchmark {
        #[command(flatten)]
        data: DataArgs,
        /// Method to benchmark; both when omitted.
        #[arg(long, value_enum)]
        method: Option<Engine>,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Worker threads for running trials.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// CSV file with a header row; a final `label` column is optional.
    #[arg(long)]
    pub input: PathBuf,
    /// File of level lists, one `feature: low < … < high` per line.
    #[arg(long)]
    pub scales: Option<PathBuf>,
    /// Inline level list in the same syntax; repeatable.
    #[arg(long = "scale", value_name = "DEF")]
    pub inline_scales: Vec<String>,
    /// Bin numeric columns into ranks, e.g. `m=5` or `m=4,strategy=equal-width`.
    #[arg(long, value_name = "SPEC", value_parser = parse_ordinalization)]
    pub ordinalize: Option<OrdinalizationSpec>,
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    #[arg(long, default_value_t = LmfcmConfig::default().clusters)]
    pub clusters: usize,
    #[arg(long, default_value_t = LmfcmConfig::default().beta)]
    pub beta: f64,
    #[arg(long, default_value_t = LmfcmConfig::default().epsilon)]
    pub epsilon: f64,
    #[arg(long, default_value_t = LmfcmConfig::default().max_iters)]
    pub max_iters: usize,
    /// Seed for all randomness; a random one is chosen and reported when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = LmfcmConfig::default().p_floor)]
    pub p_floor: f64,
    #[arg(long, default_value_t = LmfcmConfig::default().neighbor_rule, action = clap::ArgAction::Set)]
    pub neighbor_rule: bool,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Destination file; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Fcm,
    Lmfcm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Fuzzify,
    Cluster,
    Benchmark,
}

/// Parses `m=5`, `5`, or `m=5,strategy=equal-width`.
pub fn parse_ordinalization(s: &str) -> Result<OrdinalizationSpec, String> {
    let mut spec = OrdinalizationSpec::default();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part.split_once('=').unwrap_or(("m", part));
        match key.trim() {
            "m" | "bins" => {
                spec.bins = value.trim().parse().map_err(|_| format!("bad bin count {value:?}"))?;
            }
            "strategy" => {
                spec.strategy = match value.trim() {
                    "quantile" => BinStrategy::Quantile,
                    "equal-width" => BinStrategy::EqualWidth,
                    other => return Err(format!("unknown strategy {other:?} (quantile | equal-width)")),
                }
            }
            other => return Err(format!("unknown key {other:?} (m | strategy)")),
        }
    }
    if spec.bins < 2 {
        return Err("need at least 2 bins".into());
    }
    Ok(spec)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineParams {
    pub clusters: usize,
    pub beta: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub p_floor: f64,
    pub neighbor_rule: bool,
}

impl EngineParams {
    pub fn fcm(&self, seed: u64) -> FcmConfig {
        FcmConfig { clusters: self.clusters, beta: self.beta, epsilon: self.epsilon, max_iters: self.max_iters, seed }
    }

    pub fn lmfcm(&self, seed: u64) -> LmfcmConfig {
        LmfcmConfig {
            clusters: self.clusters,
            beta: self.beta,
            epsilon: self.epsilon,
            max_iters: self.max_iters,
            seed,
            p_floor: self.p_floor,
            neighbor_rule: self.neighbor_rule,
        }
    }
}

/// Everything that determines a run's result.
///
/// The output path and worker count are execution details: they are kept
/// out of the serialized form so that re-running with a different
/// destination or thread count reproduces the same bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub input: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inline_scales: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordinalize: Option<OrdinalizationSpec>,
    /// Absent for `fuzzify`, and for a `benchmark` of both methods.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<Engine>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<EngineParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    pub format: Format,
    #[serde(skip, default = "one")]
    pub jobs: usize,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

fn one() -> usize {
    1
}

impl RunConfig {
    /// Resolves parsed arguments. `fresh_seed` supplies the seed when the
    /// command needs one and none was given.
    pub fn resolve(cli: Cli, fresh_seed: impl FnOnce() -> u64) -> Self {
        let engine_params = |e: &EngineArgs| EngineParams {
            clusters: e.clusters,
            beta: e.beta,
            epsilon: e.epsilon,
            max_iters: e.max_iters,
            p_floor: e.p_floor,
            neighbor_rule: e.neighbor_rule,
        };
        let base = |command, data: DataArgs, output: OutputArgs| RunConfig {
            command,
            input: data.input,
            scales: data.scales,
            inline_scales: data.inline_scales,
            ordinalize: data.ordinalize,
            method: None,
            engine: None,
            seed: None,
            trials: None,
            format: output.format,
            jobs: 1,
            output: output.output,
        };
        match cli.command {
            Command::Fuzzify { data, output } => base(CommandKind::Fuzzify, data, output),
            Command::Cluster { data, method, engine, output } => RunConfig {
                method: Some(method),
                engine: Some(engine_params(&engine)),
                seed: Some(engine.seed.unwrap_or_else(fresh_seed)),
                ..base(CommandKind::Cluster, data, output)
            },
            Command::Benchmark { data, method, engine, trials, jobs, output } => RunConfig {
                method,
                engine: Some(engine_params(&engine)),
                seed: Some(engine.seed.unwrap_or_else(fresh_seed)),
                trials: Some(trials),
                jobs,
                ..base(CommandKind::Benchmark, data, output)
            },
        }
    }
}
