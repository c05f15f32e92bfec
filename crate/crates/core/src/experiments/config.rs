//! Flat `key = value` experiment configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Lists are
//! comma-separated. Unknown keys are rejected so typos do not silently fall
//! back to defaults.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::autoencoder::TrainConfig;
use crate::data::SplitFractions;
use crate::error::{Error, Result};

/// Where the samples come from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Blobs {
        n: usize,
        dim: usize,
        classes: usize,
        separation: f64,
    },
    Idx {
        images: PathBuf,
        labels: PathBuf,
        /// Random subset drawn from the file; the whole file when larger.
        subset: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub data: DataSource,
    pub split: SplitFractions,
    /// PCK initializations per component count.
    pub pck_q: usize,
    /// Largest PCK component count.
    pub pck_g: usize,
    /// Training samples the mixtures are fitted on.
    pub gmm_subset: usize,
    /// `lambda` and `layer_dims` are the defaults for every run; sweeps override them.
    pub train: TrainConfig,
    pub lambda_grid: Vec<f64>,
    pub code_grid: Vec<usize>,
    /// kPCA component counts; every `m` up to the training size when `None`.
    pub kpca_grid: Option<Vec<usize>>,
    /// Principal components used for denoising.
    pub components: usize,
    pub noise_std: f64,
    /// Two classes used for denoising; `0,1` for blobs and `5,6` for IDX data when `None`.
    pub denoise_classes: Option<Vec<usize>>,
    pub reg_grid: Vec<f64>,
    /// Test images written as PGM files by `denoise`.
    pub image_dumps: usize,
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            data: DataSource::Blobs {
                n: 600,
                dim: 20,
                classes: 3,
                separation: 1.0,
            },
            split: SplitFractions::default(),
            pck_q: 10,
            pck_g: 10,
            gmm_subset: 200,
            train: TrainConfig {
                lambda: 0.1,
                layer_dims: vec![16, 8],
                batch_size: 50,
                pretrain_epochs: 30,
                finetune_epochs: 100,
                batches_per_epoch: None,
                ..TrainConfig::default()
            },
            lambda_grid: vec![0.0, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0],
            code_grid: vec![4, 16, 64, 256],
            kpca_grid: None,
            components: 32,
            noise_std: 0.25,
            denoise_classes: None,
            reg_grid: crate::preimage::DEFAULT_REG_GRID.to_vec(),
            image_dumps: 8,
            out_dir: PathBuf::from("out"),
            seed: 0,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Format {
        field: key.to_string(),
        reason: format!("cannot parse {value:?}"),
    })
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    /// Parses configuration text on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut blobs = (600usize, 20usize, 3usize, 1.0f64);
        let mut idx: (Option<PathBuf>, Option<PathBuf>, usize) = (None, None, 2000);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Format {
                field: format!("line {}", lineno + 1),
                reason: format!("expected key = value, got {line:?}"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let t = &mut cfg.train;
            match key {
                "blobs_n" => blobs.0 = parse_value(key, value)?,
                "blobs_dim" => blobs.1 = parse_value(key, value)?,
                "blobs_classes" => blobs.2 = parse_value(key, value)?,
                "blobs_separation" => blobs.3 = parse_value(key, value)?,
                "mnist_images" => idx.0 = Some(PathBuf::from(value)),
                "mnist_labels" => idx.1 = Some(PathBuf::from(value)),
                "mnist_subset" => idx.2 = parse_value(key, value)?,
                "split_train" => cfg.split.train = parse_value(key, value)?,
                "split_val" => cfg.split.val = parse_value(key, value)?,
                "split_test" => cfg.split.test = parse_value(key, value)?,
                "pck_q" => cfg.pck_q = parse_value(key, value)?,
                "pck_g" => cfg.pck_g = parse_value(key, value)?,
                "gmm_subset" => cfg.gmm_subset = parse_value(key, value)?,
                "lambda" => t.lambda = parse_value(key, value)?,
                "layer_dims" => t.layer_dims = parse_list(key, value)?,
                "batch_size" => t.batch_size = parse_value(key, value)?,
                "pretrain_epochs" => t.pretrain_epochs = parse_value(key, value)?,
                "finetune_epochs" => t.finetune_epochs = parse_value(key, value)?,
                "batches_per_epoch" => {
                    t.batches_per_epoch = if value == "auto" {
                        None
                    } else {
                        Some(parse_value(key, value)?)
                    }
                }
                "learning_rate" => t.adam.learning_rate = parse_value(key, value)?,
                "adam_beta1" => t.adam.beta1 = parse_value(key, value)?,
                "adam_beta2" => t.adam.beta2 = parse_value(key, value)?,
                "adam_epsilon" => t.adam.epsilon = parse_value(key, value)?,
                "lambda_grid" => cfg.lambda_grid = parse_list(key, value)?,
                "code_grid" => cfg.code_grid = parse_list(key, value)?,
                "kpca_grid" => {
                    cfg.kpca_grid = if value == "all" {
                        None
                    } else {
                        Some(parse_list(key, value)?)
                    }
                }
                "components" => cfg.components = parse_value(key, value)?,
                "noise_std" => cfg.noise_std = parse_value(key, value)?,
                "denoise_classes" => {
                    cfg.denoise_classes = if value == "auto" {
                        None
                    } else {
                        Some(parse_list(key, value)?)
                    }
                }
                "reg_grid" => cfg.reg_grid = parse_list(key, value)?,
                "image_dumps" => cfg.image_dumps = parse_value(key, value)?,
                "out" => cfg.out_dir = PathBuf::from(value),
                "seed" => cfg.seed = parse_value(key, value)?,
                _ => {
                    return Err(Error::Format {
                        field: key.to_string(),
                        reason: format!("unknown key on line {}", lineno + 1),
                    })
                }
            }
        }
        cfg.data = match idx {
            (Some(images), Some(labels), subset) => DataSource::Idx {
                images,
                labels,
                subset,
            },
            (None, None, _) => DataSource::Blobs {
                n: blobs.0,
                dim: blobs.1,
                classes: blobs.2,
                separation: blobs.3,
            },
            _ => {
                return Err(Error::arg(
                    "mnist_images and mnist_labels must be given together",
                ))
            }
        };
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::from(e).context(format!("reading config {}", path.display())))?;
        Self::parse(&text).map_err(|e| e.context(format!("parsing config {}", path.display())))
    }

    /// Checks value ranges and that referenced files exist.
    pub fn validate(&self) -> Result<()> {
        match &self.data {
            DataSource::Blobs { n, classes, .. } => {
                if *n < 2 || *classes < 1 {
                    return Err(Error::arg(format!(
                        "invalid blobs n={n}, classes={classes}"
                    )));
                }
            }
            DataSource::Idx {
                images,
                labels,
                subset,
            } => {
                for p in [images, labels] {
                    if !p.is_file() {
                        return Err(Error::arg(format!(
                            "IDX file {} does not exist",
                            p.display()
                        )));
                    }
                }
                if *subset < 2 {
                    return Err(Error::arg("mnist_subset must be at least 2"));
                }
            }
        }
        self.split.sizes(100)?;
        self.train.validate()?;
        if self.pck_q < 1 || self.pck_g < 2 {
            return Err(Error::arg("PCK needs pck_q >= 1 and pck_g >= 2"));
        }
        if self.gmm_subset < self.pck_g {
            return Err(Error::arg("gmm_subset must be at least pck_g"));
        }
        if self.lambda_grid.is_empty() || self.code_grid.is_empty() || self.reg_grid.is_empty() {
            return Err(Error::arg("sweep grids must be non-empty"));
        }
        if let Some(bad) = self.lambda_grid.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            return Err(Error::arg(format!(
                "lambda grid value {bad} outside [0, 1]"
            )));
        }
        if self.code_grid.contains(&0) {
            return Err(Error::arg("code grid values must be positive"));
        }
        if let Some(grid) = &self.kpca_grid {
            if grid.is_empty() || grid.contains(&0) {
                return Err(Error::arg("kpca grid must be non-empty and positive"));
            }
        }
        if self.components < 1 {
            return Err(Error::arg("components must be positive"));
        }
        if !(self.noise_std >= 0.0) || !self.noise_std.is_finite() {
            return Err(Error::arg(format!("invalid noise_std {}", self.noise_std)));
        }
        if let Some(c) = &self.denoise_classes {
            if c.len() != 2 || c[0] == c[1] {
                return Err(Error::arg("denoise_classes must name two distinct classes"));
            }
        }
        if self.reg_grid.iter().any(|r| !(*r >= 0.0)) {
            return Err(Error::arg("ridge values must be >= 0"));
        }
        Ok(())
    }

    /// Denoising classes after applying the data-source default.
    pub fn resolved_denoise_classes(&self) -> Vec<usize> {
        match (&self.denoise_classes, &self.data) {
            (Some(c), _) => c.clone(),
            (None, DataSource::Blobs { .. }) => vec![0, 1],
            (None, DataSource::Idx { .. }) => vec![5, 6],
        }
    }

    /// Canonical text form; parsing it yields an equal configuration.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        match &self.data {
            DataSource::Blobs {
                n,
                dim,
                classes,
                separation,
            } => {
                kv("blobs_n", n.to_string());
                kv("blobs_dim", dim.to_string());
                kv("blobs_classes", classes.to_string());
                kv("blobs_separation", separation.to_string());
            }
            DataSource::Idx {
                images,
                labels,
                subset,
            } => {
                kv("mnist_images", images.display().to_string());
                kv("mnist_labels", labels.display().to_string());
                kv("mnist_subset", subset.to_string());
            }
        }
        kv("split_train", self.split.train.to_string());
        kv("split_val", self.split.val.to_string());
        kv("split_test", self.split.test.to_string());
        kv("pck_q", self.pck_q.to_string());
        kv("pck_g", self.pck_g.to_string());
        kv("gmm_subset", self.gmm_subset.to_string());
        let t = &self.train;
        kv("lambda", t.lambda.to_string());
        kv("layer_dims", join(&t.layer_dims));
        kv("batch_size", t.batch_size.to_string());
        kv("pretrain_epochs", t.pretrain_epochs.to_string());
        kv("finetune_epochs", t.finetune_epochs.to_string());
        kv(
            "batches_per_epoch",
            t.batches_per_epoch.map_or("auto".into(), |b| b.to_string()),
        );
        kv("learning_rate", t.adam.learning_rate.to_string());
        kv("adam_beta1", t.adam.beta1.to_string());
        kv("adam_beta2", t.adam.beta2.to_string());
        kv("adam_epsilon", t.adam.epsilon.to_string());
        kv("lambda_grid", join(&self.lambda_grid));
        kv("code_grid", join(&self.code_grid));
        kv(
            "kpca_grid",
            self.kpca_grid.as_deref().map_or("all".into(), join),
        );
        kv("components", self.components.to_string());
        kv("noise_std", self.noise_std.to_string());
        kv(
            "denoise_classes",
            self.denoise_classes.as_deref().map_or("auto".into(), join),
        );
        kv("reg_grid", join(&self.reg_grid));
        kv("image_dumps", self.image_dumps.to_string());
        kv("out", self.out_dir.display().to_string());
        kv("seed", self.seed.to_string());
        s
    }

    /// SHA-256 of [`to_text`](Self::to_text), hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
