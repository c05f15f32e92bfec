//! Denoising with kPCA plus a kernel ridge pre-image versus PCA in dkAE code space.

use log::{info, warn};

use super::config::ExperimentConfig;
use super::output::{pgm_bytes, Csv, OutputFile};
use super::pipeline::{load_data, mse, prepare, stream, stream_rng, train_run, Prepared};
use crate::autoencoder::Network;
use crate::data::{add_gaussian_noise, Dataset};
use crate::error::{Error, Result};
use crate::numerics::Matrix;
use crate::preimage::{grid_search_reg, krr_fit, krr_predict, median_sigma, Holdout, RegSearch};
use crate::spectral::{
    kpca_fit, kpca_project, nystrom_project, pca_backproject, pca_fit, pca_project,
};

#[derive(Debug, Clone)]
pub struct DenoiseReport {
    /// Components requested for both pipelines after the `n/4` cap.
    pub components: usize,
    /// Components kept by kPCA (positive eigenvalues only).
    pub kpca_components: usize,
    /// Components used in code space (at most the code size).
    pub pca_components: usize,
    pub sigma: f64,
    pub reg_search: RegSearch,
    /// MSE of the noisy inputs against the clean test samples.
    pub mse_noisy: f64,
    pub mse_kpca: f64,
    pub mse_dkae: f64,
    /// Clean test samples, noisy inputs and both reconstructions.
    pub clean: Matrix,
    pub noisy: Matrix,
    pub kpca: Matrix,
    pub dkae: Matrix,
    pub image_shape: (usize, usize),
    pub image_dumps: usize,
}

impl DenoiseReport {
    pub fn files(&self) -> Result<Vec<OutputFile>> {
        let mut csv = Csv::new(&["method", "components", "mse"]);
        csv.row(vec!["noisy".into(), 0usize.into(), self.mse_noisy.into()]);
        csv.row(vec![
            "kpca_krr".into(),
            self.kpca_components.into(),
            self.mse_kpca.into(),
        ]);
        csv.row(vec![
            "dkae_pca".into(),
            self.pca_components.into(),
            self.mse_dkae.into(),
        ]);
        let mut reg = Csv::new(&["ridge", "val_mse", "sigma"]);
        for &(r, score) in &self.reg_search.scores {
            reg.row(vec![r.into(), score.into(), self.sigma.into()]);
        }
        let mut files = vec![
            csv.into_file("denoise.csv"),
            reg.into_file("ridge_search.csv"),
        ];
        let (rows, cols) = self.image_shape;
        for i in 0..self.image_dumps.min(self.clean.rows()) {
            for (tag, m) in [
                ("original", &self.clean),
                ("noisy", &self.noisy),
                ("kpca", &self.kpca),
                ("dkae_pca", &self.dkae),
            ] {
                files.push(OutputFile::new(
                    format!("images/{i:03}_{tag}.pgm"),
                    pgm_bytes(rows, cols, m.row(i))?,
                ));
            }
        }
        Ok(files)
    }
}

/// Restricts the data to the two configured classes, then runs both pipelines.
pub fn run_denoising(cfg: &ExperimentConfig) -> Result<DenoiseReport> {
    cfg.validate()?;
    let classes = cfg.resolved_denoise_classes();
    let data = load_data(cfg)?
        .filter_classes(&classes)
        .map_err(|e| e.context(format!("selecting classes {classes:?}")))?;
    let prep = prepare(cfg, &data)?;
    let net = train_run(cfg, &prep, &cfg.train, 0)?;
    denoise_on(cfg, &prep, &net)
}

fn image_shape(d: &Dataset) -> (usize, usize) {
    d.image_shape().unwrap_or((1, d.feature_dim()))
}

/// Both pipelines for a trained network on prepared data.
pub fn denoise_on(cfg: &ExperimentConfig, prep: &Prepared, net: &Network) -> Result<DenoiseReport> {
    let x_train = prep.train.samples();
    let x_val = prep.val.samples();
    let clean = prep.test.samples();
    let noisy = add_gaussian_noise(
        &prep.test,
        cfg.noise_std,
        &mut stream_rng(cfg, stream::NOISE),
    )?
    .samples()
    .clone();
    let components = cfg.components.min(x_train.rows() / 4).max(1);

    // kPCA of the training prior, Nyström for new points, ridge regression back to inputs.
    let model = kpca_fit(&prep.p_train, components)?;
    if model.dropped() > 0 {
        warn!(
            "kPCA kept {} of {components} components",
            model.components()
        );
    }
    let z_train = kpca_project(&model);
    let z_val = nystrom_project(&model, prep.prior_vs_train(x_val)?.values())?;
    let z_noisy = nystrom_project(&model, prep.prior_vs_train(&noisy)?.values())?;
    let sigma = median_sigma(&z_train)?;
    let reg_search = grid_search_reg(
        &z_train,
        x_train,
        sigma,
        &cfg.reg_grid,
        Holdout {
            z: &z_val,
            x: x_val,
        },
        true,
    )?;
    info!("pre-image sigma {sigma:.6}, ridge {}", reg_search.best);
    let krr = krr_fit(&z_train, x_train, sigma, reg_search.best)?.with_clamp(true);
    let kpca = krr_predict(&krr, &z_noisy)?;

    // PCA on training codes, applied to the codes of the noisy inputs.
    let pca_components = components.min(net.code_dim());
    if pca_components == net.code_dim() {
        warn!(
            "code size {} does not exceed the component count; PCA keeps every direction",
            net.code_dim()
        );
    }
    let pca =
        pca_fit(&net.encode(x_train)?, pca_components).map_err(|e| e.context("code-space PCA"))?;
    let scores = pca_project(&pca, &net.encode(&noisy)?)?;
    let dkae = net.decode(&pca_backproject(&pca, &scores)?)?;

    if clean.rows() == 0 {
        return Err(Error::arg("empty test split"));
    }
    Ok(DenoiseReport {
        components,
        kpca_components: model.components(),
        pca_components,
        sigma,
        reg_search,
        mse_noisy: mse(&noisy, clean)?,
        mse_kpca: mse(&kpca, clean)?,
        mse_dkae: mse(&dkae, clean)?,
        clean: clean.clone(),
        noisy,
        kpca,
        dkae,
        image_shape: image_shape(&prep.test),
        image_dumps: cfg.image_dumps,
    })
}
