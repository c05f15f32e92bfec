//! Trains a small dkAE against a PCK prior and round-trips it through a checkpoint.

use dkae::autoencoder::{batch_loss, load_checkpoint, save_checkpoint, train_dkae, TrainConfig};
use dkae::data::{make_blobs, BlobSpec};
use dkae::kernels::{fit_pck, pck_kernel};
use dkae::numerics::Rng;

fn main() -> dkae::Result<()> {
    env_logger::init();
    let mut rng = Rng::new(3);
    let data = make_blobs(&BlobSpec::new(300, 20, 3, 1.0), &mut rng)?;
    let x = data.samples();
    let ens = fit_pck(x, 5, 8, &mut rng)?;
    let prior = pck_kernel(&ens, x, x)?;

    for lambda in [0.0, 0.5] {
        let config = TrainConfig {
            lambda,
            layer_dims: vec![16, 8],
            batch_size: 50,
            pretrain_epochs: 10,
            finetune_epochs: 30,
            ..TrainConfig::default()
        };
        let net = train_dkae(x, &prior, &config, &mut Rng::new(11))?;
        let loss = batch_loss(&net, x, &prior, lambda)?;
        println!(
            "lambda {lambda}: recon {:.5}  code {:.4}",
            loss.recon, loss.code
        );

        let path = std::env::temp_dir().join(format!("dkae_lambda_{lambda}.ckpt"));
        save_checkpoint(&net, &path)?;
        let back = load_checkpoint(&path)?;
        assert_eq!(back.encode(x)?, net.encode(x)?);
    }
    Ok(())
}
