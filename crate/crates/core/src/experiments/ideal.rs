//! Code loss of the prior, a plain autoencoder and a dkAE against the ideal kernel.

use super::config::ExperimentConfig;
use super::output::{heatmap_pgm, Csv, OutputFile};
use super::pipeline::{code_kernel, load_data, prepare, train_run, Prepared};
use crate::error::{Error, Result};
use crate::kernels::{code_loss, ideal_kernel, KernelMatrix};

pub const KERNEL_NAMES: [&str; 3] = ["P", "K_AE", "C"];

#[derive(Debug, Clone)]
pub struct IdealTable {
    /// `L_c(·, K_I)` for P, K_AE and C, in that order.
    pub losses: [f64; 3],
    /// Test kernels P, K_AE, C and K_I, rows and columns sorted by class.
    pub kernels: Vec<KernelMatrix>,
}

/// Signed percentage by which kernel `row` improves on kernel `col`:
/// `100·(L_col − L_row)/L_row`.
pub fn improvement(losses: &[f64], row: usize, col: usize) -> f64 {
    100.0 * (losses[col] - losses[row]) / losses[row]
}

impl IdealTable {
    pub fn improvement(&self, row: usize, col: usize) -> f64 {
        improvement(&self.losses, row, col)
    }

    pub fn files(&self) -> Result<Vec<OutputFile>> {
        let mut csv = Csv::new(&[
            "kernel",
            "code_loss_vs_ideal",
            "improvement_vs_P_pct",
            "improvement_vs_K_AE_pct",
            "improvement_vs_C_pct",
        ]);
        for (r, name) in KERNEL_NAMES.iter().enumerate() {
            let mut row = vec![(*name).into(), self.losses[r].into()];
            row.extend((0..3).map(|c| self.improvement(r, c).into()));
            csv.row(row);
        }
        let mut files = vec![csv.into_file("ideal_table.csv")];
        for (k, name) in self.kernels.iter().zip(["P", "K_AE", "C", "K_I"]) {
            files.push(OutputFile::new(
                format!("kernel_{name}.pgm"),
                heatmap_pgm(k)?,
            ));
        }
        Ok(files)
    }
}

/// Trains a plain autoencoder (`λ = 0`) and a dkAE with the configured `λ`
/// from the same seed, then compares test-code Gram matrices with the ideal
/// kernel of the test labels.
pub fn run_ideal_kernel_table(cfg: &ExperimentConfig) -> Result<IdealTable> {
    cfg.validate()?;
    let prep = prepare(cfg, &load_data(cfg)?)?;
    ideal_table_on(cfg, &prep)
}

pub fn ideal_table_on(cfg: &ExperimentConfig, prep: &Prepared) -> Result<IdealTable> {
    let labels = prep
        .test
        .labels()
        .ok_or_else(|| Error::arg("the ideal kernel needs labeled test data"))?;
    let x = prep.test.samples();
    let k_ideal = ideal_kernel(labels);

    let mut ae_cfg = cfg.train.clone();
    ae_cfg.lambda = 0.0;
    let ae = train_run(cfg, prep, &ae_cfg, 0).map_err(|e| e.context("plain autoencoder"))?;
    let dkae = train_run(cfg, prep, &cfg.train, 0).map_err(|e| e.context("dkAE"))?;

    let kernels = [prep.prior(x)?, code_kernel(&ae, x)?, code_kernel(&dkae, x)?];
    let mut losses = [0.0; 3];
    for (l, k) in losses.iter_mut().zip(&kernels) {
        *l = code_loss(k, &k_ideal)?;
    }
    let kernels = kernels
        .iter()
        .chain(std::iter::once(&k_ideal))
        .map(|k| k.sorted_by_labels(labels))
        .collect::<Result<Vec<_>>>()?;
    Ok(IdealTable { losses, kernels })
}
