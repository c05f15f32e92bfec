//! Deep kernelized autoencoders.
//!
//! An autoencoder is trained so that the inner products of its codes match a
//! prior kernel matrix (by default the probabilistic cluster kernel) while it
//! still reconstructs its input. The crate also carries the spectral baselines
//! the learned code space is compared against: kernel PCA with Nyström
//! out-of-sample projection, and a kernel-ridge-regression pre-image map.
//!
//! Modules, bottom up:
//!
//! * [`numerics`]: dense matrices, symmetric eigendecomposition, Cholesky, seeded RNG.
//! * [`data`]: IDX ingestion, synthetic blobs, splits, noise.
//! * [`kernels`]: PCK, RBF and ideal kernels, alignment and code loss.
//! * [`autoencoder`]: tied-weight network, joint loss and gradients, Adam, training.
//! * [`spectral`]: kernel PCA, Nyström projection, linear PCA.
//! * [`preimage`]: kernel ridge regression back-mapping.
//! * [`experiments`]: the experiment runners behind the `dkae` binary.

pub mod autoencoder;
pub mod data;
pub mod error;
pub mod experiments;
pub mod kernels;
pub mod numerics;
pub mod preimage;
pub mod spectral;

pub use error::{Error, Result};

/// Formats a float with 17 significant digits, the precision used in every CSV this crate writes.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
