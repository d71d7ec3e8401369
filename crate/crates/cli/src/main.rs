use std::process::ExitCode;

use clap::error::ErrorKind as ClapKind;
use clap::Parser;
use ordfuzz_cli::output::emit;
use ordfuzz_cli::{run, Cli, CliError, RunConfig};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ClapKind::DisplayHelp | ClapKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let config = RunConfig::resolve(cli, || {
        let seed = rand::random::<u64>();
        eprintln!("seed: {seed}");
        seed
    });

    match execute(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.kind().exit_code() as u8)
        }
    }
}

fn execute(config: &RunConfig) -> Result<(), CliError> {
    let outcome = run(config)?;
    for (what, elapsed) in &outcome.timings {
        eprintln!("elapsed ({what}): {:.3}s", elapsed.as_secs_f64());
    }
    let text = outcome.document.render(config.format)?;
    emit(&text, config.output.as_deref())
}
