//! kPCA of an uncentered kernel, low-rank reconstruction and Nyström projection.

use dkae::kernels::{code_loss, rbf_kernel};
use dkae::numerics::{Matrix, Rng};
use dkae::spectral::{kernel_reconstruction, kpca_fit, kpca_project, nystrom_project};

fn main() -> dkae::Result<()> {
    let mut rng = Rng::new(5);
    let x = Matrix::from_fn(80, 3, |_, _| rng.normal());
    let k = rbf_kernel(&x, &x, 1.5)?;

    let full = kpca_fit(&k, 80)?;
    println!("{} positive eigenvalues", full.components());
    for m in [1, 2, 4, 8, 16, 32] {
        let km = kernel_reconstruction(&kpca_project(&full.truncate(m)));
        println!("m = {m:>2}: code_loss(K_m, K) = {:.6}", code_loss(&km, &k)?);
    }

    let model = full.truncate(8);
    let x_new = Matrix::from_fn(5, 3, |_, _| rng.normal());
    let z_new = nystrom_project(&model, rbf_kernel(&x_new, &x, 1.5)?.values())?;
    println!("projections of 5 new points onto 8 components:\n{z_new:?}");
    Ok(())
}
