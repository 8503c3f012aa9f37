//! Command-line front end for the Lyapunov clamp simulator: named presets,
//! TOML-configured runs, seed sweeps, and CSV / JSON / SVG outputs.

pub mod config;
pub mod plot;
pub mod preset;
pub mod runner;
pub mod summary;
pub mod trace_csv;

pub use config::{parse_config, ConfigError, RunConfig};
pub use preset::Preset;
pub use runner::{
    execute, parse_seeds, run_config, run_config_file, run_preset, sweep, RunError, RunOptions,
    SweepReport,
};
pub use summary::Summary;
pub use trace_csv::{parse_trace, write_trace};
