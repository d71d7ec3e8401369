//! Accuracy comparison on the bundled UCI datasets.
//!
//! ```text
//! cargo run --release -p ordfuzz-core --example compare -- [trials] [bins]
//! ```

use ordfuzz::datasets;
use ordfuzz::eval::{ordinalize, run_benchmark, BenchmarkConfig, Execution, Method, OrdinalizationSpec};
use ordfuzz::fcm::FcmConfig;
use ordfuzz::lmfcm::LmfcmConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let trials = args.next().map(|a| a.parse()).transpose()?.unwrap_or(50);
    let bins = args.next().map(|a| a.parse()).transpose()?.unwrap_or(5);
    let spec = OrdinalizationSpec { bins, ..Default::default() };

    println!("{:<8} {:<14} {:>6} {:>6} {:>6} {:>5}", "data", "method", "avg", "max", "min", "fail");
    for (name, data) in [("iris", datasets::iris()), ("wine", datasets::wine())] {
        let ds = ordinalize(data.values.view(), &spec)?.with_labels(data.labels)?;
        let config = BenchmarkConfig {
            methods: vec![Method::FcmRanks, Method::Lmfcm],
            trials,
            base_seed: 0,
            fcm: FcmConfig { clusters: 3, ..Default::default() },
            lmfcm: LmfcmConfig { clusters: 3, ..Default::default() },
        };
        let report = run_benchmark(&ds, &config, Execution::with_jobs(num_jobs()))?;
        for m in &report.methods {
            let pct = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{:.1}", 100.0 * v));
            println!(
                "{:<8} {:<14} {:>6} {:>6} {:>6} {:>5}",
                name,
                m.method.name(),
                pct(m.avg),
                pct(m.max),
                pct(m.min),
                m.failures
            );
        }
    }
    Ok(())
}

fn num_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
