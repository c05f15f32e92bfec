//! Desk-scale trends and consistency checks across the experiment drivers.

use dkae::experiments::{
    code_size_sweep_on, denoise_on, improvement, kpca_comparison_on, load_data, mse, prepare,
    train_run, DataSource, ExperimentConfig,
};

fn small() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.pck_q = 5;
    cfg.pck_g = 5;
    cfg
}

/// Both validation losses should not grow with the code size in most seeds.
/// The margin is thin at this scale (3 of 5 seeds with a 64-unit hidden layer).
#[test]
fn larger_codes_do_not_hurt_in_most_seeds() {
    let mut wins = 0;
    let mut detail = Vec::new();
    for seed in 0..5 {
        let mut cfg = ExperimentConfig::default();
        cfg.seed = seed;
        cfg.train.layer_dims = vec![64, 8];
        cfg.code_grid = vec![4, 16, 64];
        let prep = prepare(&cfg, &load_data(&cfg).unwrap()).unwrap();
        let sweep = code_size_sweep_on(&cfg, &prep).unwrap();
        let l = &sweep.points;
        let ok = l.windows(2).all(|w| {
            w[1].losses.recon <= w[0].losses.recon && w[1].losses.code <= w[0].losses.code
        });
        wins += ok as usize;
        detail.push(
            l.iter()
                .map(|p| format!("{}:{:.4}/{:.4}", p.value, p.losses.recon, p.losses.code))
                .collect::<Vec<_>>()
                .join(" "),
        );
    }
    assert!(wins >= 3, "{wins}/5 seeds monotone\n{}", detail.join("\n"));
}

#[test]
fn kpca_curve_is_monotone_and_exact_at_full_rank() {
    let mut cfg = small();
    if let DataSource::Blobs { n, .. } = &mut cfg.data {
        *n = 300;
    }
    cfg.kpca_grid = None;
    cfg.train.finetune_epochs = 5;
    let prep = prepare(&cfg, &load_data(&cfg).unwrap()).unwrap();
    let net = train_run(&cfg, &prep, &cfg.train, 0).unwrap();
    let cmp = kpca_comparison_on(&cfg, &prep, &net).unwrap();
    assert_eq!(cmp.points.len(), prep.train.len());
    for w in cmp.points.windows(2) {
        assert!(
            w[1].train <= w[0].train + 1e-12,
            "{:?} then {:?}",
            w[0],
            w[1]
        );
    }
    let full = cmp.points[cmp.available_components - 1].train;
    assert!(full <= 1e-6, "loss at full rank {full}");
}

#[test]
fn noiseless_full_rank_denoising_is_plain_reconstruction() {
    let mut cfg = small();
    cfg.noise_std = 0.0;
    cfg.components = 32;
    cfg.train.finetune_epochs = 10;
    let data = load_data(&cfg).unwrap().filter_classes(&[0, 1]).unwrap();
    let prep = prepare(&cfg, &data).unwrap();
    let net = train_run(&cfg, &prep, &cfg.train, 0).unwrap();
    let report = denoise_on(&cfg, &prep, &net).unwrap();
    assert_eq!(report.pca_components, net.code_dim());
    assert_eq!(report.mse_noisy, 0.0);
    let x = prep.test.samples();
    let plain = mse(&net.reconstruct(x).unwrap(), x).unwrap();
    assert!(
        (report.mse_dkae - plain).abs() <= 1e-10,
        "{} vs {plain}",
        report.mse_dkae
    );
}

#[test]
fn improvement_is_antisymmetric_in_sign_and_zero_on_diagonal() {
    let losses = [0.3, 0.9, 0.5];
    for i in 0..3 {
        assert_eq!(improvement(&losses, i, i), 0.0);
        for j in 0..3 {
            let (a, b) = (improvement(&losses, i, j), improvement(&losses, j, i));
            assert!(a * b <= 0.0);
        }
    }
}
