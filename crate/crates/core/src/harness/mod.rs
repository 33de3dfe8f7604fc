//! Experiment driver: configuration, budget sweeps, records and plot data.

mod commands;
mod config;
mod plotdata;
mod records;
mod seedfile;

pub use commands::{cmd_run, cmd_select, cmd_stats, cmd_train, prepare, run_method, Instance, RunOutput, Selection};
pub use config::{ExperimentConfig, Method};
pub use plotdata::cmd_plotdata;
pub use records::{read_records, write_records, DiagnosticsRecord, ExperimentRecord, RECORDS_HEADER};
pub use seedfile::{read_seed_file, write_seed_file};
