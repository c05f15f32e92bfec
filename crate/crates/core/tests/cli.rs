use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const TINY: &str = "\
blobs_n = 120
blobs_dim = 6
pck_q = 3
pck_g = 3
gmm_subset = 60
layer_dims = 8, 4
pretrain_epochs = 2
finetune_epochs = 3
lambda_grid = 0, 0.5, 1
code_grid = 2, 4
kpca_grid = 1, 2, 5, 1000
components = 4
";

fn dkae(args: &[&str], extra: &[&Path]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dkae"))
        .args(args)
        .args(extra)
        .output()
        .unwrap()
}

fn run_ok(dir: &Path, sub: &str, out: &str, more: &[&str]) -> PathBuf {
    let cfg = dir.join("tiny.cfg");
    fs::write(&cfg, TINY).unwrap();
    let out = dir.join(out);
    let mut args = vec![sub];
    args.extend_from_slice(more);
    let o = Command::new(env!("CARGO_BIN_EXE_dkae"))
        .args(&args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(
        o.status.success(),
        "{sub}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(out.join("manifest.txt").is_file());
    out
}

fn csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_owned)
        .collect::<Vec<_>>();
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect();
    for r in &rows {
        assert_eq!(r.len(), header.len(), "{}", path.display());
    }
    (header, rows)
}

fn check_pgm(path: &Path) {
    let bytes = fs::read(path).unwrap();
    let text = String::from_utf8_lossy(&bytes[..bytes.len().min(32)]).into_owned();
    let mut fields = text.split_ascii_whitespace();
    assert_eq!(fields.next(), Some("P5"));
    let cols: usize = fields.next().unwrap().parse().unwrap();
    let rows: usize = fields.next().unwrap().parse().unwrap();
    assert_eq!(fields.next(), Some("255"));
    let header = format!("P5\n{cols} {rows}\n255\n");
    assert_eq!(
        bytes.len(),
        header.len() + rows * cols,
        "{}",
        path.display()
    );
}

#[test]
fn lambda_sweep_writes_one_row_per_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(dir.path(), "lambda-sweep", "l", &[]);
    let (header, rows) = csv(&out.join("lambda_sweep.csv"));
    assert_eq!(header, ["lambda", "val_recon_loss", "val_code_loss"]);
    assert_eq!(rows.len(), 3);
    // 17 significant digits for floats.
    assert!(rows[1][1].contains('e') && rows[1][1].split('e').next().unwrap().len() == 18);
}

#[test]
fn code_sweep_respects_code_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(dir.path(), "code-sweep", "c", &["--lambda", "0.25"]);
    let (header, rows) = csv(&out.join("code_dim_sweep.csv"));
    assert_eq!(header[0], "code_dim");
    assert_eq!(
        rows.iter().map(|r| r[0].as_str()).collect::<Vec<_>>(),
        ["2", "4"]
    );
    let manifest = fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("lambda = 0.25"), "{manifest}");
}

#[test]
fn ideal_table_writes_kernels() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(dir.path(), "ideal-table", "i", &["--code-dim", "3"]);
    let (_, rows) = csv(&out.join("ideal_table.csv"));
    assert_eq!(rows.len(), 3);
    for name in ["P", "K_AE", "C", "K_I"] {
        check_pgm(&out.join(format!("kernel_{name}.pgm")));
    }
}

#[test]
fn kpca_compare_clamps_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(dir.path(), "kpca-compare", "k", &[]);
    let (header, rows) = csv(&out.join("kpca_comparison.csv"));
    assert_eq!(
        header,
        ["m", "kpca_train", "dkae_train", "kpca_test", "dkae_test"]
    );
    // 1000 is clamped to the training-set size.
    assert_eq!(rows.len(), 4);
    let last: usize = rows[3][0].parse().unwrap();
    assert!(last < 1000);
}

#[test]
fn denoise_writes_three_methods() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(
        dir.path(),
        "denoise",
        "d",
        &["--noise-std", "0.1", "--components", "3"],
    );
    let (header, rows) = csv(&out.join("denoise.csv"));
    assert_eq!(header, ["method", "components", "mse"]);
    let methods: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(methods, ["noisy", "kpca_krr", "dkae_pca"]);
    let (_, ridge) = csv(&out.join("ridge_search.csv"));
    assert!(!ridge.is_empty());
}

#[test]
fn denoise_on_idx_digits_writes_images() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(
        dir.path(),
        "denoise",
        "d",
        &[
            "--mnist-images",
            data.join("digits56-images.idx3-ubyte").to_str().unwrap(),
            "--mnist-labels",
            data.join("digits56-labels.idx1-ubyte").to_str().unwrap(),
        ],
    );
    let images: Vec<PathBuf> = fs::read_dir(out.join("images"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert_eq!(images.len(), 8 * 4);
    for p in &images {
        check_pgm(p);
    }
}

#[test]
fn manifest_reruns_to_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let first = run_ok(dir.path(), "lambda-sweep", "first", &["--seed", "5"]);
    let second = dir.path().join("second");
    let o = dkae(
        &["lambda-sweep", "--config"],
        &[&first.join("manifest.txt"), Path::new("--out"), &second],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        fs::read(first.join("lambda_sweep.csv")).unwrap(),
        fs::read(second.join("lambda_sweep.csv")).unwrap()
    );
}

#[test]
fn missing_config_fails_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let o = dkae(
        &["lambda-sweep", "--config"],
        &[&dir.path().join("nope.cfg")],
    );
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("dkae: "));
}

#[test]
fn unknown_key_fails_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "learning_rat = 0.1\n").unwrap();
    let o = dkae(&["denoise", "--config"], &[&cfg]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("learning_rat"), "{err}");
}

#[test]
fn lone_mnist_flag_is_rejected() {
    let o = dkae(&["denoise", "--mnist-images", "x.idx"], &[]);
    assert!(!o.status.success());
    assert!(!o.stderr.is_empty());
}
