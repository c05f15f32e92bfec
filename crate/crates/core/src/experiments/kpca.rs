//! How well kPCA with `m` components and a dkAE approximate the prior kernel.

use super::config::ExperimentConfig;
use super::output::{Csv, OutputFile};
use super::pipeline::{code_kernel, load_data, prepare, train_run, Prepared};
use crate::autoencoder::Network;
use crate::error::Result;
use crate::kernels::{code_loss, KernelMatrix};
use crate::numerics::Matrix;
use crate::spectral::{kpca_fit, kpca_project, nystrom_project};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KpcaPoint {
    pub m: usize,
    pub train: f64,
    /// Out-of-sample curve through the Nyström projection.
    pub test: f64,
}

#[derive(Debug, Clone)]
pub struct KpcaComparison {
    pub points: Vec<KpcaPoint>,
    /// `code_loss(C, P)` on the training set.
    pub dkae_train: f64,
    pub dkae_test: f64,
    /// Positive eigenvalues of the training prior.
    pub available_components: usize,
}

impl KpcaComparison {
    pub fn files(&self) -> Vec<OutputFile> {
        let mut csv = Csv::new(&["m", "kpca_train", "dkae_train", "kpca_test", "dkae_test"]);
        for p in &self.points {
            csv.row(vec![
                p.m.into(),
                p.train.into(),
                self.dkae_train.into(),
                p.test.into(),
                self.dkae_test.into(),
            ]);
        }
        vec![csv.into_file("kpca_comparison.csv")]
    }

    /// Smallest `m` at which kPCA beats the dkAE on the training set.
    pub fn crossover(&self) -> Option<usize> {
        self.points
            .iter()
            .find(|p| p.train < self.dkae_train)
            .map(|p| p.m)
    }
}

pub fn run_kpca_comparison(cfg: &ExperimentConfig) -> Result<KpcaComparison> {
    cfg.validate()?;
    let prep = prepare(cfg, &load_data(cfg)?)?;
    let net = train_run(cfg, &prep, &cfg.train, 0)?;
    kpca_comparison_on(cfg, &prep, &net)
}

/// Adds component `j` of `z` to the running low-rank kernel `k += z_j z_jᵀ`.
fn add_rank_one(k: &mut Matrix, z: &Matrix, j: usize) {
    let col = z.column(j);
    for (a, &za) in col.iter().enumerate() {
        for (v, &zb) in k.row_mut(a).iter_mut().zip(&col) {
            *v += za * zb;
        }
    }
}

/// kPCA curves for a trained network. Component counts above the number of
/// positive eigenvalues reuse the full available rank.
pub fn kpca_comparison_on(
    cfg: &ExperimentConfig,
    prep: &Prepared,
    net: &Network,
) -> Result<KpcaComparison> {
    let x_train = prep.train.samples();
    let x_test = prep.test.samples();
    let n = x_train.rows();
    let mut grid: Vec<usize> = match &cfg.kpca_grid {
        Some(g) => g.iter().map(|&m| m.min(n)).collect(),
        None => (1..=n).collect(),
    };
    grid.sort_unstable();
    grid.dedup();

    let p_test = prep.prior(x_test)?;
    let model = kpca_fit(&prep.p_train, n)?;
    let z_train = kpca_project(&model);
    let z_test = nystrom_project(&model, prep.prior_vs_train(x_test)?.values())?;

    // K_m = Z_m Z_mᵀ is built incrementally, one component at a time.
    let mut k_train = Matrix::zeros(n, n);
    let mut k_test = Matrix::zeros(x_test.rows(), x_test.rows());
    let mut added = 0;
    let mut points = Vec::with_capacity(grid.len());
    for &m in &grid {
        let target = m.min(model.components());
        while added < target {
            add_rank_one(&mut k_train, &z_train, added);
            add_rank_one(&mut k_test, &z_test, added);
            added += 1;
        }
        points.push(KpcaPoint {
            m,
            train: code_loss(&k_train, &prep.p_train)?,
            test: code_loss(&k_test, &p_test)?,
        });
    }

    let c_train: KernelMatrix = code_kernel(net, x_train)?;
    let c_test = code_kernel(net, x_test)?;
    Ok(KpcaComparison {
        points,
        dkae_train: code_loss(&c_train, &prep.p_train)?,
        dkae_test: code_loss(&c_test, &p_test)?,
        available_components: model.components(),
    })
}
