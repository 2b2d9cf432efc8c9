//! Configuration-driven experiment grids, timing summaries and report
//! artifacts.

mod config;
mod grid;
mod report;
mod timing;

pub use config::{DatasetKind, ExperimentConfig, OUTPUT_ROOT_ENV};
pub use grid::{
    cells, compression_config, read_manifest, run_cell, run_grid, split_for, Cell, CellManifest,
    CellResult, EpochSummary, DENSITY_FILE, FIDELITY_FILE, LOSS_FILE, MANIFEST_FILE,
    TIMING_CSV_HEADER, TIMING_FILE,
};
pub use report::{
    descriptor_report, report_dir, report_dir_with, DescriptorArtifacts, ReportOutcome,
    DEFAULT_RENDER, RENDER_ENV, SUMMARY_CSV_HEADER,
};
pub use timing::{
    find_cell_dirs, jobs_consistent, timing_summary, timing_summary_csv, timing_summary_dir,
    TimingRow, TIMING_SUMMARY_HEADER,
};
