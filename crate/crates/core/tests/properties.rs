use proptest::prelude::*;

use dkae::autoencoder::{batch_loss, init_glorot, read_checkpoint, write_checkpoint};
use dkae::data::{encode_idx_images, parse_idx_images, split, Dataset, IdxImages, SplitFractions};
use dkae::experiments::{pgm_bytes, ExperimentConfig};
use dkae::kernels::{alignment, code_loss, KernelMatrix};
use dkae::numerics::{solve_spd, sym_eig, Matrix, Rng};

fn matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut rng = Rng::new(seed);
    Matrix::from_fn(rows, cols, |_, _| rng.normal())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn alignment_bounds_symmetry_and_scale(n in 2usize..20, seed in any::<u64>(), s in 0.01f64..100.0) {
        let c = matrix(n, n, seed);
        let p = matrix(n, n, seed ^ 1);
        let a = alignment(&c, &p).unwrap();
        prop_assert!((-1.0..=1.0).contains(&a));
        prop_assert!((a - alignment(&p, &c).unwrap()).abs() <= 1e-12);
        prop_assert!((a - alignment(&c.scale(s), &p).unwrap()).abs() <= 1e-12);
        let l = code_loss(&c, &p).unwrap();
        prop_assert!((l - (2.0 - 2.0 * a).sqrt()).abs() <= 1e-10);
        prop_assert!(code_loss(&c, &c.scale(s)).unwrap() <= 1e-7);
    }

    #[test]
    fn psd_pairs_have_nonnegative_alignment(n in 2usize..15, seed in any::<u64>()) {
        let c = matrix(n, 3, seed).gram();
        let p = matrix(n, 4, seed ^ 2).gram();
        prop_assert!(alignment(&c, &p).unwrap() >= -1e-12);
    }

    #[test]
    fn batch_loss_decomposes(
        dims in prop::collection::vec(2usize..8, 2..4),
        k in 2usize..7,
        lambda in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let mut rng = Rng::new(seed);
        let net = init_glorot(&dims, &mut rng).unwrap();
        let x = Matrix::from_fn(k, dims[0], |_, _| rng.uniform());
        let p = Matrix::from_fn(k, 2, |_, _| rng.uniform()).gram();
        let l = batch_loss(&net, &x, &p, lambda).unwrap();
        prop_assert!((l.total - ((1.0 - lambda) * l.recon + lambda * l.code)).abs() <= 1e-12);
        let codes = net.encode(&x).unwrap();
        prop_assert!(codes.as_slice().iter().all(|&v| v > 0.0 && v < 1.0));
    }

    #[test]
    fn split_partitions_the_data(n in 3usize..200, seed in any::<u64>()) {
        let data = Dataset::new(Matrix::from_fn(n, 1, |i, _| i as f64 / n as f64), None).unwrap();
        let fractions = SplitFractions::default();
        let (tr, va, te) = split(&data, fractions, &mut Rng::new(seed)).unwrap();
        prop_assert_eq!((tr.len(), va.len(), te.len()), fractions.sizes(n).unwrap());
        let mut all: Vec<f64> = [tr, va, te]
            .iter()
            .flat_map(|d| d.samples().as_slice().to_vec())
            .collect();
        all.sort_by(f64::total_cmp);
        let expected: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
        prop_assert_eq!(all, expected);
    }

    #[test]
    fn idx_images_round_trip(count in 0usize..5, rows in 1usize..6, cols in 1usize..6, seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let pixels = (0..count * rows * cols).map(|_| rng.below(256) as u8).collect();
        let images = IdxImages { count, rows, cols, pixels };
        prop_assert_eq!(parse_idx_images(&encode_idx_images(&images)).unwrap(), images);
    }

    #[test]
    fn kernel_binary_round_trip(rows in 0usize..8, cols in 0usize..8, seed in any::<u64>()) {
        let k = KernelMatrix::new(matrix(rows, cols, seed)).unwrap();
        let mut buf = Vec::new();
        k.write_binary(&mut buf).unwrap();
        prop_assert_eq!(buf.len(), 16 + 8 * rows * cols);
        let back = KernelMatrix::read_binary(&mut buf.as_slice()).unwrap();
        prop_assert_eq!(back.values(), k.values());
    }

    #[test]
    fn checkpoint_round_trip(dims in prop::collection::vec(1usize..9, 2..5), seed in any::<u64>()) {
        let net = init_glorot(&dims, &mut Rng::new(seed)).unwrap();
        let mut buf = Vec::new();
        write_checkpoint(&net, &mut buf).unwrap();
        let back = read_checkpoint(&mut buf.as_slice()).unwrap();
        prop_assert_eq!(back.dims(), net.dims());
        prop_assert_eq!(back.param_slices(), net.param_slices());
    }

    #[test]
    fn eigendecomposition_reconstructs(n in 1usize..25, seed in any::<u64>()) {
        let m = matrix(n, n, seed);
        let a = m.add(&m.transpose()).unwrap();
        let eig = sym_eig(&a).unwrap();
        prop_assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
        let scale = a.frobenius_norm().max(1.0);
        prop_assert!(eig.reconstruct().sub(&a).unwrap().max_abs() <= 1e-10 * scale);
        let vtv = eig.vectors.t_matmul(&eig.vectors).unwrap();
        prop_assert!(vtv.sub(&Matrix::identity(n)).unwrap().max_abs() <= 1e-10);
    }

    #[test]
    fn spd_solve_residual(n in 1usize..20, rhs in 1usize..4, seed in any::<u64>()) {
        let mut a = matrix(n, n + 2, seed).gram();
        for i in 0..n {
            a[(i, i)] += 0.1;
        }
        let b = matrix(n, rhs, seed ^ 3);
        let x = solve_spd(&a, &b).unwrap();
        let resid = a.matmul(&x).unwrap().sub(&b).unwrap().frobenius_norm();
        prop_assert!(resid <= 1e-8 * b.frobenius_norm().max(1.0));
    }

    #[test]
    fn config_text_round_trip(
        lambda in 0.0f64..=1.0,
        dims in prop::collection::vec(1usize..300, 1..4),
        noise in 0.0f64..1.0,
        seed in any::<u64>(),
    ) {
        let mut cfg = ExperimentConfig::default();
        cfg.train.lambda = lambda;
        cfg.train.layer_dims = dims;
        cfg.noise_std = noise;
        cfg.seed = seed;
        let back = ExperimentConfig::parse(&cfg.to_text()).unwrap();
        prop_assert_eq!(back.hash(), cfg.hash());
        prop_assert_eq!(back, cfg);
    }

    #[test]
    fn pgm_size(rows in 1usize..10, cols in 1usize..10) {
        let bytes = pgm_bytes(rows, cols, &vec![0.5; rows * cols]).unwrap();
        let header = format!("P5\n{cols} {rows}\n255\n");
        prop_assert_eq!(bytes.len(), header.len() + rows * cols);
    }
}
