//! Kernel ridge regression from low-dimensional projections back to inputs.

use dkae::numerics::{Matrix, Rng};
use dkae::preimage::{
    grid_search_reg, krr_fit, krr_predict, median_sigma, Holdout, DEFAULT_REG_GRID,
};

fn main() -> dkae::Result<()> {
    let mut rng = Rng::new(2);
    // A 2-d latent variable drives 4 outputs.
    let mut sample = |n: usize| {
        let z = Matrix::from_fn(n, 2, |_, _| rng.uniform_in(-1.0, 1.0));
        let x = Matrix::from_fn(n, 4, |i, j| {
            let (a, b) = (z[(i, 0)], z[(i, 1)]);
            0.5 + 0.4 * [a.sin(), a * b, b.cos() - 0.5, 0.5 * (a + b)][j]
        });
        (z, x)
    };
    let (z, x) = sample(120);
    let (zv, xv) = sample(40);

    let sigma = median_sigma(&z)?;
    let search = grid_search_reg(
        &z,
        &x,
        sigma,
        &DEFAULT_REG_GRID,
        Holdout { z: &zv, x: &xv },
        true,
    )?;
    for (reg, mse) in &search.scores {
        println!("ridge {reg:>6}: validation MSE {mse:.3e}");
    }
    let model = krr_fit(&z, &x, sigma, search.best)?.with_clamp(true);
    let pred = krr_predict(&model, &zv.select_rows(&[0]))?;
    println!("sigma {sigma:.4}, best ridge {}", search.best);
    println!("target {:.4?}\npredicted {:.4?}", xv.row(0), pred.row(0));
    Ok(())
}
