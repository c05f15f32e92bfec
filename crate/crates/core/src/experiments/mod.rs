//! Experiment runners: loss trade-off sweeps, ideal-kernel comparison, kPCA
//! comparison and denoising. Each runner returns a report whose `files`
//! are written next to a manifest by [`write_outputs`].

mod config;
mod denoise;
mod ideal;
mod kpca;
mod output;
mod pipeline;
mod sweeps;

pub use config::{DataSource, ExperimentConfig};
pub use denoise::{denoise_on, run_denoising, DenoiseReport};
pub use ideal::{ideal_table_on, improvement, run_ideal_kernel_table, IdealTable, KERNEL_NAMES};
pub use kpca::{kpca_comparison_on, run_kpca_comparison, KpcaComparison, KpcaPoint};
pub use output::{
    heatmap_pgm, manifest_text, pgm_bytes, write_atomic, write_outputs, Cell, Csv, OutputFile,
};
pub use pipeline::{
    code_kernel, evaluate, load_data, mse, prepare, stream, stream_rng, train_run, train_seed,
    EvalLosses, Prepared,
};
pub use sweeps::{
    code_size_sweep_on, lambda_sweep_on, run_code_size_sweep, run_lambda_sweep, SweepPoint,
    SweepReport,
};
