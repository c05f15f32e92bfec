//! Denoising two blob classes with kPCA + pre-image and with PCA in code space,
//! writing the CSV, PGM dumps and manifest to a temporary directory.

use dkae::experiments::{run_denoising, write_outputs, ExperimentConfig};

fn main() -> dkae::Result<()> {
    env_logger::init();
    let cfg = ExperimentConfig::parse("seed = 4\nlayer_dims = 32, 64\nnoise_std = 0.25\n")?;
    let report = run_denoising(&cfg)?;
    println!("noisy input MSE   {:.5}", report.mse_noisy);
    println!(
        "kPCA + KRR MSE    {:.5}  ({} components)",
        report.mse_kpca, report.kpca_components
    );
    println!(
        "dkAE + PCA MSE    {:.5}  ({} components)",
        report.mse_dkae, report.pca_components
    );

    let out = std::env::temp_dir().join("dkae-denoise");
    let written = write_outputs(&out, "denoise", &cfg, &report.files()?)?;
    println!("{} files written to {}", written.len(), out.display());
    Ok(())
}
