//! Sweeps, verification suites, result export and caching.

pub mod baseline;
pub mod oracles;
pub mod records;
pub mod suites;
pub mod sweep;

pub use baseline::Baseline;
pub use records::{export_plot_data, OutputFormat, RecordCache, SweepEntry};
pub use suites::{verify_suite, verify_suite_with, Check, CheckStatus, Suite, SuiteReport};
pub use sweep::{records_at, run_sweep, SweepConfig};
