//! Kernel matrices: the probabilistic cluster kernel prior, RBF and ideal
//! kernels, and the alignment-based code loss.

mod gmm;
mod matrix;
mod pck;

pub use gmm::{fit_gmm, gmm_posteriors, EmConfig, GmmModel, EMPTY_COMPONENT_MASS};
pub use matrix::{alignment, code_loss, ideal_kernel, rbf_kernel, KernelMatrix};
pub use pck::{fit_pck, fit_pck_with, pck_kernel, PckEnsemble, PckMember};
