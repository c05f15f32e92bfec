//! Probabilistic cluster kernel on synthetic blobs.

use dkae::data::{make_blobs, BlobSpec};
use dkae::kernels::{code_loss, fit_pck, ideal_kernel, pck_kernel};
use dkae::numerics::{sym_eig, Rng};

fn main() -> dkae::Result<()> {
    let mut rng = Rng::new(1);
    let data = make_blobs(&BlobSpec::new(150, 10, 3, 1.0), &mut rng)?;
    let x = data.samples();

    let ens = fit_pck(x, 5, 6, &mut rng)?;
    println!("{} mixtures fitted", ens.len());
    let k = pck_kernel(&ens, x, x)?;

    let eig = sym_eig(&k)?;
    println!("leading eigenvalues: {:.3?}", &eig.values[..5]);
    println!("smallest eigenvalue: {:.3e}", eig.values.last().unwrap());

    let labels = data.labels().unwrap();
    let (mut within, mut cross) = ((0.0, 0usize), (0.0, 0usize));
    for i in 0..x.rows() {
        for j in 0..x.rows() {
            let acc = if labels[i] == labels[j] {
                &mut within
            } else {
                &mut cross
            };
            acc.0 += k[(i, j)];
            acc.1 += 1;
        }
    }
    println!(
        "mean within-class {:.3}, cross-class {:.3}",
        within.0 / within.1 as f64,
        cross.0 / cross.1 as f64
    );
    println!(
        "L_c against the ideal kernel: {:.4}",
        code_loss(&k, &ideal_kernel(labels))?
    );

    let path = std::env::temp_dir().join("pck_kernel.bin");
    k.save(&path)?;
    println!("saved to {}", path.display());
    Ok(())
}
