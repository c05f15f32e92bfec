//! Data preparation, prior construction and training shared by the experiments.

use log::info;

use super::config::{DataSource, ExperimentConfig};
use crate::autoencoder::{batch_loss, train_dkae, Network, TrainConfig};
use crate::data::{load_idx, make_blobs, split, BlobSpec, Dataset};
use crate::error::Result;
use crate::kernels::{fit_pck, pck_kernel, KernelMatrix, PckEnsemble};
use crate::numerics::{Matrix, Rng};

/// Independent random streams derived from the master seed.
pub mod stream {
    pub const DATA: u64 = 1;
    pub const SPLIT: u64 = 2;
    pub const PCK: u64 = 3;
    pub const NOISE: u64 = 4;
    /// Training run `i` uses stream `TRAIN + i`.
    pub const TRAIN: u64 = 1 << 16;
}

pub fn stream_rng(cfg: &ExperimentConfig, stream: u64) -> Rng {
    Rng::with_stream(cfg.seed, stream)
}

/// Seed for training run `i`.
pub fn train_seed(cfg: &ExperimentConfig, i: u64) -> u64 {
    stream_rng(cfg, stream::TRAIN + i).next_u64()
}

/// Loads or generates the full labeled dataset.
pub fn load_data(cfg: &ExperimentConfig) -> Result<Dataset> {
    let mut rng = stream_rng(cfg, stream::DATA);
    match &cfg.data {
        DataSource::Blobs {
            n,
            dim,
            classes,
            separation,
        } => make_blobs(&BlobSpec::new(*n, *dim, *classes, *separation), &mut rng),
        DataSource::Idx {
            images,
            labels,
            subset,
        } => {
            let full = load_idx(images, labels)?;
            if *subset >= full.len() {
                return Ok(full);
            }
            let mut idx = rng.sample_indices(full.len(), *subset);
            idx.sort_unstable();
            Ok(full.subset(&idx))
        }
    }
}

/// Splits and PCK prior over the training set.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub train: Dataset,
    pub val: Dataset,
    pub test: Dataset,
    pub ensemble: PckEnsemble,
    pub p_train: KernelMatrix,
}

impl Prepared {
    /// PCK kernel among the rows of `x`.
    pub fn prior(&self, x: &Matrix) -> Result<KernelMatrix> {
        pck_kernel(&self.ensemble, x, x)
    }

    /// PCK kernel between the rows of `x` and the training samples.
    pub fn prior_vs_train(&self, x: &Matrix) -> Result<KernelMatrix> {
        pck_kernel(&self.ensemble, x, self.train.samples())
    }
}

/// Splits `data` and fits the PCK on a uniform subset of the training split.
pub fn prepare(cfg: &ExperimentConfig, data: &Dataset) -> Result<Prepared> {
    let (train, val, test) = split(data, cfg.split, &mut stream_rng(cfg, stream::SPLIT))?;
    let mut rng = stream_rng(cfg, stream::PCK);
    let m = cfg.gmm_subset.min(train.len());
    let mut idx = rng.sample_indices(train.len(), m);
    idx.sort_unstable();
    let fit_on = train.samples().select_rows(&idx);
    info!(
        "fitting PCK (Q={}, G={}) on {m} of {} training samples",
        cfg.pck_q,
        cfg.pck_g,
        train.len()
    );
    let ensemble = fit_pck(&fit_on, cfg.pck_q, cfg.pck_g, &mut rng)?;
    let p_train = pck_kernel(&ensemble, train.samples(), train.samples())?;
    Ok(Prepared {
        train,
        val,
        test,
        ensemble,
        p_train,
    })
}

/// Trains on the training split with a seed derived from run index `run`.
pub fn train_run(
    cfg: &ExperimentConfig,
    prep: &Prepared,
    train: &TrainConfig,
    run: u64,
) -> Result<Network> {
    let mut train = train.clone();
    train.seed = train_seed(cfg, run);
    info!(
        "training dkAE lambda={} dims={:?} seed={}",
        train.lambda, train.layer_dims, train.seed
    );
    train_dkae(
        prep.train.samples(),
        &prep.p_train,
        &train,
        &mut Rng::new(train.seed),
    )
}

/// Full-set losses: mean squared reconstruction error per sample and
/// dimension, and the code loss of the full code Gram matrix against `prior`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalLosses {
    pub recon: f64,
    pub code: f64,
}

pub fn evaluate(net: &Network, x: &Matrix, prior: &KernelMatrix) -> Result<EvalLosses> {
    let l = batch_loss(net, x, prior, 0.5)?;
    Ok(EvalLosses {
        recon: l.recon,
        code: l.code,
    })
}

/// Gram matrix of the codes of `x`.
pub fn code_kernel(net: &Network, x: &Matrix) -> Result<KernelMatrix> {
    KernelMatrix::new_square(net.encode(x)?.gram())
}

/// Mean squared error over all entries.
pub fn mse(a: &Matrix, b: &Matrix) -> Result<f64> {
    let d = a.sub(b)?;
    Ok(d.as_slice().iter().map(|v| v * v).sum::<f64>() / d.as_slice().len().max(1) as f64)
}
