//! Sweep runner behind the `rlfm` command: config parsing, CSV output and SVG
//! figures.

pub mod config;
pub mod output;
pub mod plot;
pub mod sweep;

pub use config::{load_config, parse_config, ConfigError, Mode, SweepSpec};
pub use output::{read_spectrum_csv, read_sweep_csv, CsvRow};
pub use sweep::{run_sweep, validation_table, PointResult, SweepOutcome};
