//! Monte-Carlo capacity benchmark: planted trials, brute-force oracle,
//! hyperparameter presets, sweeps and report emission.

mod oracle;
mod presets;
mod report;
mod stats;
mod sweep;
mod trial;

pub use oracle::{brute_force_oracle, search_space, OracleResult, DEFAULT_ORACLE_CAP};
pub use presets::{
    lookup_preset, PresetLookup, PresetRow, PresetTable, EMBEDDED_PRESETS, PRESETS_ENV,
};
pub use report::{
    emit_report, operational_capacity, round_sig6, rows_from_csv, rows_to_csv, write_atomic,
    CapacityReport, CapacityRow, PresetMatch, ReportFormat, CAPACITY_ACCURACY, CSV_HEADER,
};
pub use stats::{wilson_interval, Z95};
pub use sweep::{
    build_pool, codebook_size_for, realized_size, run_sweep, run_sweep_with, run_trials, summarize,
    trial_seed, Precision, PresetSource, ResolvedSize, SweepConfig, DEFAULT_TRIALS,
};
pub use trial::{
    factorizer_seed, run_trial, run_trial_detailed, Instance, TrialDetail, TrialResult,
};
