use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use hyqurp_core::circuit::DEFAULT_BLOCKS;
use hyqurp_core::encoder::DEFAULT_THETA;
use hyqurp_core::head::Profile;
use hyqurp_train::augment::AugmentFlags;
use hyqurp_train::checkpoint::{write_metrics_csv, Checkpoint};
use hyqurp_train::config::{ModelKind, ModelSpec, TrainConfig, DEFAULT_SEEDS};
use hyqurp_train::data::{load_manifest, save_manifest, split_counts, synth_dataset, ShapeFamily, SynthSpec, DEFAULT_CANDIDATES};
use hyqurp_train::metrics::{accuracy, invariance_metrics, mean_std};
use hyqurp_train::trainer::{model_from_checkpoint, sample_splits, train_loop, train_with_retry};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{CommaList, ConfigFile, ResolvedConfig};
use crate::verify::{self, VerifyOptions};
use crate::{CheckFailed, EvalArgs, GenDataArgs, TrainArgs, UsageError, VerifyArgs};

/// Largest N the statevector simulator accepts for the hybrid model.
pub const MAX_HYBRID_N: usize = 6;

pub const MANIFEST_FILE: &str = "manifest.csv";
pub const CONFIG_FILE: &str = "config.txt";
pub const CHECKPOINT_FILE: &str = "checkpoint.txt";
pub const METRICS_FILE: &str = "metrics.csv";
pub const SUMMARY_FILE: &str = "summary.csv";

pub fn run_dir(out: &Path, seed: u64) -> PathBuf {
    out.join(format!("seed-{seed}"))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

const GEN_DATA_KEYS: [&str; 6] = ["classes", "objects_per_class", "candidates", "noise", "seed", "out"];

pub fn gen_data(args: &GenDataArgs) -> Result<()> {
    let file = ConfigFile::load(args.config.as_deref())?;
    file.check_keys(&GEN_DATA_KEYS)?;
    let classes = file.resolve("classes", args.classes.clone(), || CommaList(vec![ShapeFamily::Sphere, ShapeFamily::Cube, ShapeFamily::Simplex]))?;
    let objects_per_class = file.resolve("objects_per_class", args.objects_per_class, || 100)?;
    let candidates = file.resolve("candidates", args.candidates, || DEFAULT_CANDIDATES)?;
    let noise = file.resolve("noise", args.noise, || 0.0)?;
    let seed = file.resolve("seed", args.seed, || 121)?;
    let out = file.resolve("out", args.out.clone(), || PathBuf::from("data"))?;

    let spec = SynthSpec { classes: classes.0.clone(), objects_per_class, candidates, noise };
    let records = synth_dataset(&spec, &mut ChaCha8Rng::seed_from_u64(seed))?;
    create_dir(&out)?;
    let manifest = out.join(MANIFEST_FILE);
    save_manifest(&manifest, &records)?;
    let mut resolved = ResolvedConfig::default();
    resolved.push("classes", &classes);
    resolved.push("objects_per_class", objects_per_class);
    resolved.push("candidates", candidates);
    resolved.push("noise", noise);
    resolved.push("seed", seed);
    resolved.push("out", out.display());
    resolved.write(&out.join(CONFIG_FILE))?;

    let (tr, va, te) = split_counts(objects_per_class);
    println!("wrote {} objects to {}", records.len(), manifest.display());
    println!("{:<10} {:>5} {:>5} {:>5}", "class", "train", "val", "test");
    for c in &classes.0 {
        println!("{:<10} {tr:>5} {va:>5} {te:>5}", c.to_string());
    }
    Ok(())
}

const TRAIN_KEYS: [&str; 15] = [
    "manifest",
    "out",
    "model",
    "n",
    "b",
    "theta",
    "profile",
    "k_classes",
    "lr",
    "epochs",
    "batch_size",
    "sigma_jitter",
    "augment",
    "seeds",
    "retry",
];

/// Everything `train` runs with, after precedence is applied.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainRun {
    pub manifest: PathBuf,
    pub out: PathBuf,
    pub spec: ModelSpec,
    pub train: TrainConfig,
    pub retry: bool,
}

impl TrainRun {
    pub fn resolved(&self) -> ResolvedConfig {
        let mut r = ResolvedConfig::default();
        r.push("manifest", self.manifest.display());
        r.push("out", self.out.display());
        r.push("model", self.spec.kind);
        r.push("n", self.spec.n);
        r.push("b", self.spec.blocks);
        r.push("theta", self.spec.theta);
        r.push("profile", self.spec.profile);
        r.push("k_classes", self.spec.classes);
        r.push("lr", self.train.lr);
        r.push("epochs", self.train.epochs);
        r.push("batch_size", self.train.batch_size);
        r.push("sigma_jitter", self.train.sigma_jitter);
        r.push("augment", self.train.augment);
        r.push("seeds", CommaList(self.train.seeds.clone()));
        r.push("retry", self.retry);
        r
    }
}

/// Applies defaults < config file < flags and validates the result. The
/// class count falls back to the manifest's largest label plus one.
pub fn resolve_train(args: &TrainArgs, label_count: impl FnOnce(&Path) -> Result<usize>) -> Result<TrainRun> {
    let file = ConfigFile::load(args.config.as_deref())?;
    file.check_keys(&TRAIN_KEYS)?;
    let manifest: PathBuf = file.require("manifest", args.manifest.clone())?;
    let out = file.resolve("out", args.out.clone(), || PathBuf::from("runs"))?;
    let kind = file.resolve("model", args.model, || ModelKind::Hybrid)?;
    let n = file.resolve("n", args.n, || 4)?;
    let blocks = file.resolve("b", args.b, || DEFAULT_BLOCKS)?;
    let theta = file.resolve("theta", args.theta, || DEFAULT_THETA)?;
    let profile = file.resolve("profile", args.profile, || Profile::Light)?;
    let k = match file.resolve::<usize>("k_classes", args.k_classes, || 0)? {
        0 => label_count(&manifest)?,
        k => k,
    };
    let lr = file.resolve("lr", args.lr, || 1e-3)?;
    let epochs = file.resolve("epochs", args.epochs, || 1000)?;
    let batch_size = file.resolve("batch_size", args.batch_size, || 35)?;
    let sigma_jitter = file.resolve("sigma_jitter", args.sigma_jitter, || 0.02)?;
    let augment = file.resolve("augment", args.augment, || AugmentFlags::ALL)?;
    let seeds = file.resolve("seeds", args.seeds.clone(), || CommaList(DEFAULT_SEEDS.to_vec()))?;
    let retry = file.resolve("retry", args.retry, || false)?;

    if !(2..=MAX_HYBRID_N).contains(&n) && kind == ModelKind::Hybrid {
        return Err(UsageError(format!("--n must be in 2..={MAX_HYBRID_N} for the hybrid model, got {n}")).into());
    }
    if n < 2 {
        return Err(UsageError(format!("--n must be at least 2, got {n}")).into());
    }
    if blocks == 0 {
        return Err(UsageError("--b must be at least 1".into()).into());
    }
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(UsageError(format!("--theta must be positive, got {theta}")).into());
    }
    if seeds.0.is_empty() {
        return Err(UsageError("--seeds is empty".into()).into());
    }
    let spec = ModelSpec { kind, n, blocks, theta, profile, classes: k };
    let train = TrainConfig { lr, batch_size, epochs, sigma_jitter, augment, seeds: seeds.0, classes: k };
    train.validate()?;
    Ok(TrainRun { manifest, out, spec, train, retry })
}

pub fn train(args: &TrainArgs) -> Result<()> {
    let mut records = None;
    let run = resolve_train(args, |m| {
        let r = load_manifest(m)?;
        let k = r.iter().map(|o| o.label + 1).max().unwrap_or(0);
        records = Some(r);
        Ok(k)
    })?;
    let records = match records {
        Some(r) => r,
        None => load_manifest(&run.manifest)?,
    };
    if let Some(bad) = records.iter().find(|o| o.label >= run.spec.classes) {
        return Err(UsageError(format!("object `{}` has label {} but K = {}", bad.id, bad.label, run.spec.classes)).into());
    }
    create_dir(&run.out)?;
    let resolved = run.resolved();
    resolved.write(&run.out.join(CONFIG_FILE))?;
    println!(
        "training {} N={} K={} ({} parameters) on {} objects, {} seed(s)",
        run.spec.kind,
        run.spec.n,
        run.spec.classes,
        run.spec.n_params()?,
        records.len(),
        run.train.seeds.len()
    );

    let mut summary = String::from("seed,lr,best_epoch,best_val_acc,test_acc\n");
    let mut accs = Vec::with_capacity(run.train.seeds.len());
    for &seed in &run.train.seeds {
        let splits = sample_splits(&records, run.spec.n, seed)?;
        let result = if run.retry { train_with_retry(&run.spec, &splits, &run.train, seed)? } else { train_loop(&run.spec, &splits, &run.train, seed)? };
        let dir = run_dir(&run.out, seed);
        create_dir(&dir)?;
        result.checkpoint.save(&dir.join(CHECKPOINT_FILE))?;
        write_metrics_csv(&dir.join(METRICS_FILE), &result.log)?;
        let mut own = resolved.clone();
        own.0.retain(|(k, _)| k != "seeds" && k != "lr");
        own.push("lr", result.checkpoint.config.lr);
        own.push("seed", seed);
        own.write(&dir.join(CONFIG_FILE))?;
        let ck = &result.checkpoint;
        println!("seed {seed}: best val {:.4} at epoch {}, test {:.4}", ck.best_val_acc, ck.epoch, result.test_acc);
        summary.push_str(&format!("{seed},{},{},{},{}\n", ck.config.lr, ck.epoch, ck.best_val_acc, result.test_acc));
        accs.push(result.test_acc);
    }
    fs::write(run.out.join(SUMMARY_FILE), summary).with_context(|| format!("writing {}", run.out.join(SUMMARY_FILE).display()))?;
    let (mean, std) = mean_std(&accs);
    println!("test accuracy over {} seed(s): {:.4} ± {:.4}", accs.len(), mean, std);
    Ok(())
}

pub fn eval(args: &EvalArgs) -> Result<()> {
    let ck = Checkpoint::load(&args.checkpoint)?;
    let model = model_from_checkpoint(&ck)?;
    let records = load_manifest(&args.manifest)?;
    // the run seed reproduces the items the checkpoint was selected on
    let splits = sample_splits(&records, ck.spec.n, ck.config.seed)?;
    let items = splits.get(args.split);
    println!("model {} N={} K={}, epoch {}, seed {}", ck.spec.kind, ck.spec.n, ck.spec.classes, ck.epoch, ck.config.seed);
    println!("{} accuracy: {:.6} ({} items)", args.split, accuracy(model.as_ref(), items)?, items.len());
    if args.transforms == 0 {
        return Ok(());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let (mut cos_sum, mut ratio_sum, mut cos_dev, mut ratio_dev) = (0.0, 0.0, 0.0f64, 0.0f64);
    for t in 0..args.transforms {
        let (c, r) = invariance_metrics(model.as_ref(), &items[t % items.len()].points, &mut rng)?;
        cos_sum += c;
        ratio_sum += r;
        cos_dev = cos_dev.max((1.0 - c).abs());
        ratio_dev = ratio_dev.max((1.0 - r).abs());
    }
    let t = args.transforms as f64;
    println!("invariance over {} transforms:", args.transforms);
    println!("  cosine {:.6}  (max |1 - cos| {:.3e})", cos_sum / t, cos_dev);
    println!("  ratio  {:.6}  (max |1 - ratio| {:.3e})", ratio_sum / t, ratio_dev);
    Ok(())
}

pub fn verify(args: &VerifyArgs) -> Result<()> {
    let opts = VerifyOptions { n_min: args.n_min, n_max: args.n_max, seed: args.seed, inject_fault: args.inject_fault };
    let outcomes = verify::run(&opts, |o| println!("{o}"))?;
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| format!("{} (n={})", o.name, o.n)).collect();
    if failed.is_empty() {
        println!("all {} checks passed", outcomes.len());
        Ok(())
    } else {
        Err(CheckFailed(failed).into())
    }
}
