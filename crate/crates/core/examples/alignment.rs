//! Kernel alignment and the code loss between a few small kernels.

use dkae::kernels::{alignment, code_loss, ideal_kernel, rbf_kernel};
use dkae::numerics::{Matrix, Rng};

fn main() -> dkae::Result<()> {
    let labels = [0, 0, 1, 1, 2, 2];
    let ideal = ideal_kernel(&labels);

    let mut rng = Rng::new(7);
    // Points near one of three centers, matching the labels above.
    let x = Matrix::from_fn(6, 2, |i, j| {
        let center = [[0.0, 0.0], [3.0, 0.0], [0.0, 3.0]][labels[i]][j];
        center + 0.2 * rng.normal()
    });
    for sigma in [0.3, 1.0, 3.0, 10.0] {
        let k = rbf_kernel(&x, &x, sigma)?;
        let a = alignment(&k, &ideal)?;
        let l = code_loss(&k, &ideal)?;
        println!(
            "sigma {sigma:>5}: alignment {a:.6}  code loss {l:.6}  sqrt(2-2a) {:.6}",
            (2.0 - 2.0 * a).sqrt()
        );
    }
    Ok(())
}
