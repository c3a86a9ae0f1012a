//! Configuration-driven front end for `ifns_core`.

pub mod config;
pub mod run;

pub use config::{parse_horizon, parse_spec, parse_spec_str, AnalysisSpec, Format, Overrides, Task};
pub use run::{run, summary_table, without_timing, Report};
