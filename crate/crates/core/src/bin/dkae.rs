use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dkae::experiments::{
    run_code_size_sweep, run_denoising, run_ideal_kernel_table, run_kpca_comparison,
    run_lambda_sweep, write_outputs, DataSource, ExperimentConfig, OutputFile,
};

#[derive(Parser)]
#[command(
    name = "dkae",
    version,
    about = "Deep kernelized autoencoder experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// MNIST images in IDX format (requires --mnist-labels).
    #[arg(long, requires = "mnist_labels")]
    mnist_images: Option<PathBuf>,
    #[arg(long, requires = "mnist_images")]
    mnist_labels: Option<PathBuf>,
}

#[derive(Args)]
struct Model {
    /// Code-loss weight.
    #[arg(long)]
    lambda: Option<f64>,
    /// Width of the code layer.
    #[arg(long)]
    code_dim: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Validation losses over the lambda grid.
    LambdaSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        code_dim: Option<usize>,
    },
    /// Validation losses over the code-size grid.
    CodeSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Code loss against the ideal kernel for the prior, a plain autoencoder and a dkAE.
    IdealTable {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: Model,
    },
    /// Prior approximation by kPCA with m components versus the dkAE.
    KpcaCompare {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: Model,
    },
    /// Denoising with kPCA plus pre-image versus PCA in code space.
    Denoise {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: Model,
        /// Principal components for both pipelines.
        #[arg(long)]
        components: Option<usize>,
        #[arg(long)]
        noise_std: Option<f64>,
    },
}

fn base_config(common: &Common) -> dkae::Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = &common.out {
        cfg.out_dir = out.clone();
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let (Some(images), Some(labels)) = (&common.mnist_images, &common.mnist_labels) {
        let subset = match &cfg.data {
            DataSource::Idx { subset, .. } => *subset,
            DataSource::Blobs { .. } => 2000,
        };
        cfg.data = DataSource::Idx {
            images: images.clone(),
            labels: labels.clone(),
            subset,
        };
    }
    Ok(cfg)
}

fn apply_model(cfg: &mut ExperimentConfig, lambda: Option<f64>, code_dim: Option<usize>) {
    if let Some(l) = lambda {
        cfg.train.lambda = l;
    }
    if let Some(c) = code_dim {
        if let Some(last) = cfg.train.layer_dims.last_mut() {
            *last = c;
        }
    }
}

fn run(cli: Cli) -> dkae::Result<Vec<PathBuf>> {
    let (name, cfg, files): (&str, ExperimentConfig, Vec<OutputFile>) = match cli.command {
        Command::LambdaSweep { common, code_dim } => {
            let mut cfg = base_config(&common)?;
            apply_model(&mut cfg, None, code_dim);
            let files = run_lambda_sweep(&cfg)?.files();
            ("lambda-sweep", cfg, files)
        }
        Command::CodeSweep { common, lambda } => {
            let mut cfg = base_config(&common)?;
            apply_model(&mut cfg, lambda, None);
            let files = run_code_size_sweep(&cfg)?.files();
            ("code-sweep", cfg, files)
        }
        Command::IdealTable { common, model } => {
            let mut cfg = base_config(&common)?;
            apply_model(&mut cfg, model.lambda, model.code_dim);
            let files = run_ideal_kernel_table(&cfg)?.files()?;
            ("ideal-table", cfg, files)
        }
        Command::KpcaCompare { common, model } => {
            let mut cfg = base_config(&common)?;
            apply_model(&mut cfg, model.lambda, model.code_dim);
            let files = run_kpca_comparison(&cfg)?.files();
            ("kpca-compare", cfg, files)
        }
        Command::Denoise {
            common,
            model,
            components,
            noise_std,
        } => {
            let mut cfg = base_config(&common)?;
            apply_model(&mut cfg, model.lambda, model.code_dim);
            if let Some(c) = components {
                cfg.components = c;
            }
            if let Some(s) = noise_std {
                cfg.noise_std = s;
            }
            let files = run_denoising(&cfg)?.files()?;
            ("denoise", cfg, files)
        }
    };
    write_outputs(&cfg.out_dir, name, &cfg, &files)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("dkae: {e}");
            ExitCode::FAILURE
        }
    }
}
