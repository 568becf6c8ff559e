pub mod config;
pub mod output;
pub mod run;
pub mod sweep;

pub use config::{parse_config, Experiment, Format, RunConfig};
pub use run::{execute, Outcome, RunError};
