//! Experiment orchestration: link configuration and presets, seeded
//! end-to-end runs, sweeps and result files.

mod config;
mod link;
mod output;
mod sweep;

pub use config::{
    Band, ChannelConfig, DpdConfig, LinkConfig, Modulation, RxConfig, TxDspConfig, PRESETS,
    SCHEMA_VERSION,
};
pub use link::{commensurate_length, frame_length, run_link, run_link_traced, LinkOutcome};
pub use output::{
    config_digest, emit_outputs, render_svg, report, table_from_csv, table_to_csv, EmittedFiles,
    RunManifest, CSV_FILE, CSV_HEADER, MANIFEST_FILE, PLOT_FILE,
};
pub use sweep::{
    core_configs, error_chain, is_unimodal, run_all, single_run, sweep_cores, sweep_entropy,
    sweep_symbol_rate, ResultTable, SweepKind, SweepRow,
};
