use std::time::{Duration, Instant};

use ordfuzz::data::{hard_assignment, OrdinalDataset};
use ordfuzz::eval::{accuracy, run_benchmark, BenchmarkConfig, Execution, Method};
use ordfuzz::fcm::fcm_run;
use ordfuzz::fuzzify::{build_tables, fuzzify_dataset};
use ordfuzz::lmfcm::lmfcm_run;

use crate::config::{CommandKind, Engine, EngineParams, RunConfig};
use crate::error::{CliError, Result};
use crate::input::{load_csv, ScaleDefs};
use crate::output::{ClusterOutput, DatasetSummary, FuzzifyOutput, Payload, ResultsFile};

/// A finished run: the document to persist and wall-clock timings.
#[derive(Debug)]
pub struct Outcome {
    pub document: ResultsFile,
    pub timings: Vec<(String, Duration)>,
}

fn rows(a: &ndarray::Array2<f64>) -> Vec<Vec<f64>> {
    a.outer_iter().map(|r| r.to_vec()).collect()
}

/// Loads the dataset named by `config`.
pub fn load_dataset(config: &RunConfig) -> Result<OrdinalDataset> {
    let mut scales = match &config.scales {
        Some(path) => ScaleDefs::read(path)?,
        None => ScaleDefs::default(),
    };
    for def in &config.inline_scales {
        scales.push_line(def).map_err(|e| CliError::Usage(format!("--scale {def:?}: {e}")))?;
    }
    load_csv(&config.input, &scales, config.ordinalize)
}

fn summary(ds: &OrdinalDataset) -> DatasetSummary {
    let f = ds.features();
    DatasetSummary {
        observations: ds.n_obs(),
        features: f.names().to_vec(),
        levels: f.scales().iter().map(|s| s.len()).collect(),
        labelled: ds.labels().is_some(),
    }
}

fn engine_of(config: &RunConfig) -> Result<(&EngineParams, u64)> {
    match (&config.engine, config.seed) {
        (Some(e), Some(seed)) => Ok((e, seed)),
        _ => Err(CliError::Usage("engine parameters and seed are required".into())),
    }
}

/// Executes one resolved configuration.
pub fn run(config: &RunConfig) -> Result<Outcome> {
    let ds = load_dataset(config)?;
    let mut timings = Vec::new();
    let start = Instant::now();
    let result = match config.command {
        CommandKind::Fuzzify => {
            let tables = build_tables(ds.features())?;
            let fuzzified = fuzzify_dataset(ds.features(), &tables)?;
            Payload::Fuzzify(FuzzifyOutput { tables, fuzzified: rows(&fuzzified) })
        }
        CommandKind::Cluster => Payload::Cluster(Box::new(cluster(&ds, config)?)),
        CommandKind::Benchmark => {
            let (params, seed) = engine_of(config)?;
            if ds.labels().is_none() {
                return Err(CliError::Data("benchmark needs a `label` column".into()));
            }
            let methods = match config.method {
                Some(Engine::Fcm) => vec![Method::FcmRanks],
                Some(Engine::Lmfcm) => vec![Method::Lmfcm],
                None => vec![Method::FcmRanks, Method::Lmfcm],
            };
            let bench = BenchmarkConfig {
                methods,
                trials: config.trials.unwrap_or(1),
                base_seed: seed,
                fcm: params.fcm(seed),
                lmfcm: params.lmfcm(seed),
            };
            if bench.trials == 0 {
                return Err(CliError::Usage("--trials must be at least 1".into()));
            }
            for m in &bench.methods {
                validate(&ds, params, *m)?;
            }
            let report = run_benchmark(&ds, &bench, Execution::with_jobs(config.jobs))?;
            timings.extend(report.methods.iter().map(|m| (m.method.name().to_string(), m.elapsed)));
            Payload::Benchmark(report)
        }
    };
    timings.push(("total".into(), start.elapsed()));
    let document = ResultsFile::new(config.clone(), summary(&ds), result);
    Ok(Outcome { document, timings })
}

fn validate(ds: &OrdinalDataset, params: &EngineParams, method: Method) -> Result<()> {
    let checked = match method {
        Method::FcmRanks => params.fcm(0).validate(ds.n_obs()),
        Method::Lmfcm => params.lmfcm(0).validate(ds.n_obs()),
    };
    checked.map_err(|e| CliError::Usage(e.to_string()))
}

fn cluster(ds: &OrdinalDataset, config: &RunConfig) -> Result<ClusterOutput> {
    let (params, seed) = engine_of(config)?;
    let method = config.method.unwrap_or(Engine::Lmfcm);
    let mut out = match method {
        Engine::Fcm => {
            validate(ds, params, Method::FcmRanks)?;
            let points = ds.features().ranks_as_f64();
            let res = fcm_run(points.view(), &params.fcm(seed))?;
            ClusterOutput {
                method,
                assignment: hard_assignment(&res.memberships),
                memberships: res.memberships,
                fuzzy_memberships: None,
                centroids: Some(rows(&res.centroids)),
                modes: None,
                cluster_order: None,
                objective_trace: res.objective_trace,
                iterations: res.iterations,
                converged: res.converged,
                restarts: None,
                coincident_clusters: None,
                accuracy: None,
            }
        }
        Engine::Lmfcm => {
            validate(ds, params, Method::Lmfcm)?;
            let run = lmfcm_run(ds.features(), &params.lmfcm(seed))?;
            let state = run.state;
            let (memberships, fuzzy_memberships) = match state.reassigned {
                Some(r) => (r, Some(state.fuzzy_memberships)),
                None => (state.fuzzy_memberships, None),
            };
            ClusterOutput {
                method,
                assignment: hard_assignment(&memberships),
                memberships,
                fuzzy_memberships,
                centroids: None,
                modes: Some(rows(&state.modes)),
                cluster_order: Some(state.cluster_order),
                objective_trace: run.diagnostics.objective_trace,
                iterations: run.diagnostics.iterations,
                converged: run.diagnostics.converged,
                restarts: Some(run.diagnostics.restarts),
                coincident_clusters: Some(run.diagnostics.coincident_clusters),
                accuracy: None,
            }
        }
    };
    if let Some(truth) = ds.labels() {
        out.accuracy = Some(accuracy(&out.assignment, truth)?);
    }
    Ok(out)
}
