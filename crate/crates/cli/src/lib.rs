//! Command-line front end for `ordfuzz`: CSV ingestion, run orchestration
//! and result files.

pub mod config;
pub mod error;
pub mod input;
pub mod output;
pub mod run;

pub use config::{Cli, RunConfig};
pub use error::{CliError, ErrorKind};
pub use input::{load_csv, ScaleDefs};
pub use output::{read_memberships, read_results, ResultsFile, SCHEMA};
pub use run::{run, Outcome};
