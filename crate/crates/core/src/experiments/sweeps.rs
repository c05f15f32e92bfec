//! Trade-off sweeps over the code-loss weight and the code size.

use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::output::{Csv, OutputFile};
use super::pipeline::{evaluate, load_data, prepare, train_run, EvalLosses, Prepared};
use crate::error::Result;

/// Validation losses of one trained model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    /// `λ` or the code size, depending on the sweep.
    pub value: f64,
    pub losses: EvalLosses,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub parameter: &'static str,
    pub points: Vec<SweepPoint>,
}

impl SweepReport {
    pub fn files(&self) -> Vec<OutputFile> {
        let mut csv = Csv::new(&[self.parameter, "val_recon_loss", "val_code_loss"]);
        for p in &self.points {
            let value = if self.parameter == "code_dim" {
                (p.value as usize).into()
            } else {
                p.value.into()
            };
            csv.row(vec![value, p.losses.recon.into(), p.losses.code.into()]);
        }
        let name = format!("{}_sweep.csv", self.parameter);
        vec![csv.into_file(&name)]
    }
}

/// One dkAE per `λ` in the grid with the configured code size; losses on the validation split.
pub fn run_lambda_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let prep = prepare(cfg, &load_data(cfg)?)?;
    lambda_sweep_on(cfg, &prep)
}

/// Lambda sweep on already prepared data.
pub fn lambda_sweep_on(cfg: &ExperimentConfig, prep: &Prepared) -> Result<SweepReport> {
    let p_val = prep.prior(prep.val.samples())?;
    let points = cfg
        .lambda_grid
        .par_iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let mut train = cfg.train.clone();
            train.lambda = lambda;
            let net = train_run(cfg, prep, &train, i as u64)
                .map_err(|e| e.context(format!("lambda = {lambda}")))?;
            Ok(SweepPoint {
                value: lambda,
                losses: evaluate(&net, prep.val.samples(), &p_val)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport {
        parameter: "lambda",
        points,
    })
}

/// One dkAE per code size (ascending, duplicates removed) with the configured `λ`.
pub fn run_code_size_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let prep = prepare(cfg, &load_data(cfg)?)?;
    code_size_sweep_on(cfg, &prep)
}

pub fn code_size_sweep_on(cfg: &ExperimentConfig, prep: &Prepared) -> Result<SweepReport> {
    let p_val = prep.prior(prep.val.samples())?;
    let mut grid = cfg.code_grid.clone();
    grid.sort_unstable();
    grid.dedup();
    let points = grid
        .par_iter()
        .enumerate()
        .map(|(i, &code_dim)| {
            let mut train = cfg.train.clone();
            *train.layer_dims.last_mut().expect("validated non-empty") = code_dim;
            let net = train_run(cfg, prep, &train, i as u64)
                .map_err(|e| e.context(format!("code size {code_dim}")))?;
            Ok(SweepPoint {
                value: code_dim as f64,
                losses: evaluate(&net, prep.val.samples(), &p_val)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport {
        parameter: "code_dim",
        points,
    })
}
