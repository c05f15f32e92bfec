//! kPCA with m components versus a dkAE as approximations of the PCK prior.

use dkae::experiments::{run_kpca_comparison, ExperimentConfig};

fn main() -> dkae::Result<()> {
    env_logger::init();
    let cfg = ExperimentConfig::parse("kpca_grid = 1, 2, 3, 4, 8, 16, 64, 420\n")?;
    let cmp = run_kpca_comparison(&cfg)?;
    println!(
        "dkAE: train {:.4}  test {:.4}",
        cmp.dkae_train, cmp.dkae_test
    );
    for p in &cmp.points {
        println!(
            "m = {:>3}: kPCA train {:.4}  test {:.4}",
            p.m, p.train, p.test
        );
    }
    match cmp.crossover() {
        Some(m) => println!("kPCA overtakes the dkAE at m = {m}"),
        None => println!("kPCA never overtakes on this grid"),
    }
    Ok(())
}
