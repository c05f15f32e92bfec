//! The deep kernelized autoencoder: a tied-weight stacked autoencoder whose
//! code Gram matrix is pulled toward a prior kernel.

mod adam;
mod checkpoint;
mod loss;
mod network;
mod train;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use checkpoint::{
    load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint, CHECKPOINT_MAGIC,
    CHECKPOINT_VERSION,
};
pub use loss::{
    batch_loss, gradients, loss_and_gradients, reconstruction_loss, BatchLoss, Gradients,
    MIN_CODE_GRAM_NORM,
};
pub use network::{init_glorot, LayerParams, Network, Transfer};
pub use train::{
    finetune, finetune_with_log, pretrain, pretrain_with_log, train_dkae, PretrainLog, TrainConfig,
};
