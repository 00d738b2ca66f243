//! Config and output formats.

mod config;
mod output;
mod validate;

pub use config::{
    parse_config, ChainConfig, GridConfig, OutputTarget, OutputsConfig, RunConfig, SegmentConfig,
};
pub use output::{
    csv_header, emit_curve, format_value, write_csv, write_curve, write_json, ChainMetadata,
    CurveDocument, CurveMetadata, OutputFormat,
};
pub use validate::{
    early_time_ratio_error, fig11_crossover, revival_ratio, run_validation_suite,
    single_oscillator_chain, CheckResult, CrossoverSummary, ToleranceProfile, ValidationReport,
};
