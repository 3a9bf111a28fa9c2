//! Command-line front end: synthetic data generation, training, evaluation
//! and the verification suite.

pub mod commands;
pub mod config;
pub mod verify;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hyqurp_core::head::Profile;
use hyqurp_train::augment::AugmentFlags;
use hyqurp_train::config::ModelKind;
use hyqurp_train::data::ShapeFamily;
use hyqurp_train::TrainError;

use crate::config::CommaList;

/// Bad flags, config values or arguments; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// A verification or acceptance check failed; exits with status 1.
#[derive(Debug)]
pub struct CheckFailed(pub Vec<String>);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "failed checks: {}", self.0.join(", "))
    }
}

impl std::error::Error for CheckFailed {}

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// 2 for usage and config errors, 1 for everything else.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() || matches!(err.downcast_ref::<TrainError>(), Some(TrainError::Config(_))) {
        EXIT_USAGE
    } else {
        EXIT_FAILURE
    }
}

/// Output-directory override.
pub const OUT_ENV: &str = "HYQURP_OUT";

#[derive(Debug, Parser)]
#[command(name = "hyqurp", version, about = "Rotation- and permutation-invariant hybrid quantum point-cloud classifier")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic shape dataset as a manifest plus points files.
    GenData(GenDataArgs),
    /// Train one model per seed and report mean ± std test accuracy.
    Train(TrainArgs),
    /// Accuracy and logit invariance of a checkpoint.
    Eval(EvalArgs),
    /// Run the invariant suite for a range of N.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    /// `key=value` file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma list of sphere, cube, cylinder, disc, simplex.
    #[arg(long)]
    pub classes: Option<CommaList<ShapeFamily>>,
    #[arg(long)]
    pub objects_per_class: Option<usize>,
    /// Candidate surface points per object.
    #[arg(long)]
    pub candidates: Option<usize>,
    /// Gaussian noise per coordinate on the candidates.
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, env = OUT_ENV)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long, env = OUT_ENV)]
    pub out: Option<PathBuf>,
    /// hybrid, set-mlp or mlp.
    #[arg(long)]
    pub model: Option<ModelKind>,
    /// Points per object.
    #[arg(long)]
    pub n: Option<usize>,
    /// Circuit blocks.
    #[arg(long)]
    pub b: Option<usize>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// light or mid.
    #[arg(long)]
    pub profile: Option<Profile>,
    /// Class count; defaults to the manifest's largest label plus one.
    #[arg(long)]
    pub k_classes: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub sigma_jitter: Option<f64>,
    /// `none` or a comma list of rotation, permutation, jitter.
    #[arg(long)]
    pub augment: Option<AugmentFlags>,
    #[arg(long)]
    pub seeds: Option<CommaList<u64>>,
    /// On a non-finite loss, retry with the adjacent learning rates of the
    /// grid.
    #[arg(long)]
    pub retry: Option<bool>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub manifest: PathBuf,
    /// Random rotation+permutation draws; 0 skips the invariance block.
    #[arg(long, default_value_t = 100)]
    pub transforms: usize,
    /// train, val or test.
    #[arg(long, default_value = "test")]
    pub split: hyqurp_train::data::Split,
    /// Seed of the transformation stream.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Test hook: negate generator terms touching wire 1.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::GenData(a) => commands::gen_data(&a),
        Command::Train(a) => commands::train(&a),
        Command::Eval(a) => commands::eval(&a),
        Command::Verify(a) => commands::verify(&a),
    }
}
