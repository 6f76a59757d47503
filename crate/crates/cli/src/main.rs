//! `manireg` command-line tool.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::Failure;

#[derive(Debug, Parser)]
#[command(name = "manireg", version, about = "Potts and Mumford-Shah regularization of manifold-valued data")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true, env = "MANIREG_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic ground-truth dataset and its JSON manifest.
    Simulate(SimulateArgs),
    /// Add noise: Rician in the DWI domain for tensor data, Gaussian on the
    /// squared ODF for Q-ball data.
    Noise(NoiseArgs),
    /// Fit diffusion tensors to a DWI directory.
    Fit(FitArgs),
    /// Regularize a dataset (1-row inputs exactly, images by splitting).
    Regularize(RegularizeArgs),
    /// Export glyphs as text.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimKind {
    /// Piecewise-constant tensors: 4 segments (1 row) or an elliptic region.
    DtiPwconst,
    /// Smoothly turning tensors with one jump.
    DtiSmooth,
    /// Single fiber on the left half, 90° crossing on the right half.
    QballCrossing,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub kind: SimKind,
    #[arg(long)]
    pub rows: usize,
    #[arg(long)]
    pub cols: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sharpness of the synthetic ODF peaks (qball-crossing only).
    #[arg(long, default_value_t = 20.0)]
    pub sharpness: f64,
    /// Output dataset; the manifest goes to `<out>.json`.
    #[arg(long)]
    pub out: std::path::PathBuf,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("level").required(true).args(["sigma", "kappa"])))]
pub struct NoiseArgs {
    /// Noise standard deviation.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Noise level label for tensor data, mapped to `sigma = A0 / kappa`.
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Tensor dataset, DWI directory or Q-ball dataset.
    #[arg(long = "in")]
    pub input: std::path::PathBuf,
    /// DWI directory for tensor inputs, dataset for Q-ball inputs.
    #[arg(long)]
    pub out: std::path::PathBuf,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// DWI directory.
    #[arg(long = "in")]
    pub input: std::path::PathBuf,
    /// Tensor dataset; a report goes to `<out>.json`.
    #[arg(long)]
    pub out: std::path::PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Potts,
    Ms,
    Lpvq,
}

#[derive(Debug, Args)]
pub struct RegularizeArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    /// Data term exponent (1 or 2).
    #[arg(long, default_value_t = 2)]
    pub p: u32,
    /// Coupling exponent (1 or 2, default `p`); `ms` and `lpvq`. Potts accepts
    /// only `q = p`.
    #[arg(long)]
    pub q: Option<u32>,
    /// Smoothing weight; `ms` and `lpvq` only.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Jump penalty; `potts` and `ms` only.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Initial penalty weight of the image splitting.
    #[arg(long, default_value_t = 1e-2)]
    pub mu0: f64,
    /// Growth of the penalty weight (default 2^p).
    #[arg(long)]
    pub tau: Option<f64>,
    /// Maximal outer iterations of the image splitting.
    #[arg(long, default_value_t = 40)]
    pub outer: usize,
    /// Initial proximal parameter of the CPPA.
    #[arg(long, default_value_t = 2.0)]
    pub lambda0: f64,
    /// Maximal CPPA sweeps.
    #[arg(long, default_value_t = 300)]
    pub sweeps: usize,
    #[arg(long = "in")]
    pub input: std::path::PathBuf,
    #[arg(long)]
    pub out: std::path::PathBuf,
    /// Diagnostics JSON (default `<out>.json`).
    #[arg(long)]
    pub trace: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GlyphKind {
    Ellipsoid,
    Odf,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long, value_enum)]
    pub glyphs: GlyphKind,
    /// Level `c` of the ellipsoids `xᵀ S x = c`.
    #[arg(long, default_value_t = 1.0)]
    pub level: f64,
    #[arg(long = "in")]
    pub input: std::path::PathBuf,
    #[arg(long)]
    pub out: std::path::PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Noise(a) => commands::noise(a),
        Command::Fit(a) => commands::fit(a),
        Command::Regularize(a) => commands::regularize(a),
        Command::Export(a) => commands::export(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::User(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(2)
        }
    }
}
