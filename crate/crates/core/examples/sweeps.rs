//! Reconstruction versus alignment as lambda and the code size change.

use dkae::experiments::{run_code_size_sweep, run_lambda_sweep, ExperimentConfig};

fn main() -> dkae::Result<()> {
    env_logger::init();
    let cfg = ExperimentConfig::parse(
        "lambda_grid = 0, 0.1, 0.5, 0.9\ncode_grid = 4, 16, 64\nlayer_dims = 64, 8\n",
    )?;
    for report in [run_lambda_sweep(&cfg)?, run_code_size_sweep(&cfg)?] {
        println!(
            "{:>9} {:>12} {:>12}",
            report.parameter, "val L_r", "val L_c"
        );
        for p in &report.points {
            println!(
                "{:>9} {:>12.6} {:>12.6}",
                p.value, p.losses.recon, p.losses.code
            );
        }
    }
    Ok(())
}
