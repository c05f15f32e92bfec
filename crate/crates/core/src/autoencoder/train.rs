//! Greedy layer-wise pretraining and end-to-end fine-tuning.

use log::debug;

use super::adam::{adam_step, AdamConfig, AdamState};
use super::loss::loss_and_gradients;
use super::network::{init_glorot, Network};
use crate::error::{Error, Result};
use crate::kernels::KernelMatrix;
use crate::numerics::{Matrix, Rng};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Weight of the code loss, in `[0, 1]`.
    pub lambda: f64,
    /// Widths after the input layer, ending with the code dimension.
    pub layer_dims: Vec<usize>,
    /// Mini-batch size `k`; capped at the number of training samples.
    pub batch_size: usize,
    pub pretrain_epochs: usize,
    pub finetune_epochs: usize,
    /// Steps per epoch; `⌈(n/k)²⌉` when `None`.
    pub batches_per_epoch: Option<usize>,
    pub adam: AdamConfig,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lambda: 0.1,
            layer_dims: vec![500, 500, 2000, 2000],
            batch_size: 200,
            pretrain_epochs: 30,
            finetune_epochs: 100,
            batches_per_epoch: None,
            adam: AdamConfig::default(),
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::arg(format!(
                "lambda must lie in [0, 1], got {}",
                self.lambda
            )));
        }
        if self.batch_size < 2 {
            return Err(Error::arg(format!(
                "batch size must be at least 2, got {}",
                self.batch_size
            )));
        }
        if self.layer_dims.is_empty() || self.layer_dims.contains(&0) {
            return Err(Error::arg(format!(
                "invalid layer widths {:?}",
                self.layer_dims
            )));
        }
        if self.batches_per_epoch == Some(0) {
            return Err(Error::arg("batches_per_epoch must be positive"));
        }
        self.adam.validate()
    }

    pub fn effective_batch_size(&self, n: usize) -> usize {
        self.batch_size.min(n)
    }

    /// Mini-batches per epoch for `n` training samples.
    pub fn batches_per_epoch(&self, n: usize) -> usize {
        self.batches_per_epoch.unwrap_or_else(|| {
            let ratio = n as f64 / self.effective_batch_size(n) as f64;
            (ratio * ratio).ceil().max(1.0) as usize
        })
    }

    /// Full architecture for inputs of dimension `input_dim`.
    pub fn dims(&self, input_dim: usize) -> Vec<usize> {
        std::iter::once(input_dim)
            .chain(self.layer_dims.iter().copied())
            .collect()
    }
}

fn check_inputs(x: &Matrix, prior: &KernelMatrix, config: &TrainConfig) -> Result<()> {
    config.validate()?;
    let n = x.rows();
    if n < 2 {
        return Err(Error::arg(format!(
            "training needs at least 2 samples, got {n}"
        )));
    }
    if prior.shape() != (n, n) {
        return Err(Error::dim(format!(
            "prior {:?} does not cover {n} training samples",
            prior.shape()
        )));
    }
    Ok(())
}

/// Runs `steps` Adam updates on uniformly drawn mini-batches.
/// Returns the total batch loss of every step.
fn optimize(
    net: &mut Network,
    x: &Matrix,
    prior: &KernelMatrix,
    lambda: f64,
    steps: usize,
    config: &TrainConfig,
    rng: &mut Rng,
) -> Result<Vec<f64>> {
    let n = x.rows();
    let k = config.effective_batch_size(n);
    let mut state = AdamState::new(&net.param_slices());
    let mut history = Vec::with_capacity(steps);
    for step in 0..steps {
        let idx = rng.sample_indices(n, k);
        let xb = x.select_rows(&idx);
        let pb = if lambda > 0.0 {
            prior.submatrix(&idx).into_matrix()
        } else {
            // The code term is inactive; any nonzero block keeps shapes consistent.
            Matrix::identity(k)
        };
        let (loss, grads) = loss_and_gradients(net, &xb, &pb, lambda, true)
            .map_err(|e| e.context(format!("training step {step}")))?;
        adam_step(
            &mut net.param_slices_mut(),
            &grads.slices(),
            &mut state,
            &config.adam,
        )?;
        history.push(loss.total);
    }
    Ok(history)
}

/// Per-layer loss histories from pretraining.
pub type PretrainLog = Vec<Vec<f64>>;

/// Greedy layer-wise pretraining; see [`pretrain_with_log`].
pub fn pretrain(
    data: &Matrix,
    prior: &KernelMatrix,
    config: &TrainConfig,
    rng: &mut Rng,
) -> Result<Network> {
    pretrain_with_log(data, prior, config, rng).map(|(net, _)| net)
}

/// Trains one single-layer autoencoder per layer on the previous layer's
/// codes, then stacks them. Inner layers minimize reconstruction only; the
/// code layer uses the joint objective with `config.lambda`.
pub fn pretrain_with_log(
    data: &Matrix,
    prior: &KernelMatrix,
    config: &TrainConfig,
    rng: &mut Rng,
) -> Result<(Network, PretrainLog)> {
    check_inputs(data, prior, config)?;
    let dims = config.dims(data.cols());
    let steps = config.pretrain_epochs * config.batches_per_epoch(data.rows());
    let n_layers = dims.len() - 1;
    let mut representation = data.clone();
    let mut layers = Vec::with_capacity(n_layers);
    let mut log = Vec::with_capacity(n_layers);
    for (l, w) in dims.windows(2).enumerate() {
        let mut layer_rng = rng.fork(l as u64);
        let mut single = init_glorot(w, &mut layer_rng)?;
        let lambda = if l + 1 == n_layers {
            config.lambda
        } else {
            0.0
        };
        let history = optimize(
            &mut single,
            &representation,
            prior,
            lambda,
            steps,
            config,
            &mut layer_rng,
        )
        .map_err(|e| e.context(format!("pretraining layer {l} ({}→{})", w[0], w[1])))?;
        debug!(
            "pretrained layer {l} ({}→{}), final batch loss {:?}",
            w[0],
            w[1],
            history.last()
        );
        representation = single.encode(&representation)?;
        layers.extend(single.into_layers());
        log.push(history);
    }
    let net = Network::new(layers, super::network::Transfer::Sigmoid)?;
    Ok((net, log))
}

/// End-to-end fine-tuning; see [`finetune_with_log`].
pub fn finetune(
    net: &Network,
    data: &Matrix,
    prior: &KernelMatrix,
    config: &TrainConfig,
    rng: &mut Rng,
) -> Result<Network> {
    finetune_with_log(net, data, prior, config, rng).map(|(net, _)| net)
}

/// `finetune_epochs × batches_per_epoch` Adam steps on the joint objective.
pub fn finetune_with_log(
    net: &Network,
    data: &Matrix,
    prior: &KernelMatrix,
    config: &TrainConfig,
    rng: &mut Rng,
) -> Result<(Network, Vec<f64>)> {
    check_inputs(data, prior, config)?;
    if net.input_dim() != data.cols() {
        return Err(Error::dim(format!(
            "network expects {} inputs, data has {}",
            net.input_dim(),
            data.cols()
        )));
    }
    let steps = config.finetune_epochs * config.batches_per_epoch(data.rows());
    let mut out = net.clone();
    let history = optimize(&mut out, data, prior, config.lambda, steps, config, rng)
        .map_err(|e| e.context("fine-tuning"))?;
    Ok((out, history))
}

/// Pretraining followed by fine-tuning, each on its own derived stream.
pub fn train_dkae(
    data: &Matrix,
    prior: &KernelMatrix,
    config: &TrainConfig,
    rng: &mut Rng,
) -> Result<Network> {
    let mut pre_rng = rng.fork(1);
    let mut fine_rng = rng.fork(2);
    let net = pretrain(data, prior, config, &mut pre_rng)?;
    finetune(&net, data, prior, config, &mut fine_rng)
}
