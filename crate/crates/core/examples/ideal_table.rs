//! Compares the prior, a plain autoencoder and a dkAE against the ideal kernel.

use dkae::experiments::{run_ideal_kernel_table, ExperimentConfig, KERNEL_NAMES};

fn main() -> dkae::Result<()> {
    env_logger::init();
    let cfg = ExperimentConfig::parse("seed = 1\nlambda = 0.1\n")?;
    let table = run_ideal_kernel_table(&cfg)?;
    println!(
        "{:<6} {:>10} {:>8} {:>8} {:>8}",
        "kernel", "L_c(.,K_I)", "vs P", "vs K_AE", "vs C"
    );
    for (r, name) in KERNEL_NAMES.iter().enumerate() {
        println!(
            "{name:<6} {:>10.4} {:>7.1}% {:>7.1}% {:>7.1}%",
            table.losses[r],
            table.improvement(r, 0),
            table.improvement(r, 1),
            table.improvement(r, 2)
        );
    }
    Ok(())
}
