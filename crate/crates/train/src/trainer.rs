//! Mini-batch training with best-validation checkpoint selection.
//!
//! Randomness is split from the run seed into ChaCha8 streams: stream 0
//! initialises the model, stream 1 subsamples the objects, and stream
//! `1 + e` shuffles and augments epoch `e` (1-based).

use std::collections::HashSet;

use hyqurp_core::model::Classifier;
use hyqurp_core::random::random_permutation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::augment::augment;
use crate::checkpoint::{Checkpoint, ConfigEcho, EpochMetrics};
use crate::config::{ModelSpec, TrainConfig, LR_GRID};
use crate::data::{sample_split, ObjectRecord, Point, SampledItem, Split};
use crate::error::{Result, TrainError};
use crate::metrics::{accuracy, argmax};
use crate::optim::{adam_step, OptimizerState};

pub const STREAM_INIT: u64 = 0;
pub const STREAM_SAMPLING: u64 = 1;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn epoch_stream(epoch: usize) -> u64 {
    1 + epoch as u64
}

#[derive(Debug, Clone, PartialEq)]
pub struct Splits {
    pub train: Vec<SampledItem>,
    pub val: Vec<SampledItem>,
    pub test: Vec<SampledItem>,
}

impl Splits {
    pub fn get(&self, split: Split) -> &[SampledItem] {
        match split {
            Split::Train => &self.train,
            Split::Val => &self.val,
            Split::Test => &self.test,
        }
    }
}

/// Subsamples every object once for this run seed. Object ids must be
/// unique, which keeps the splits disjoint at object level.
pub fn sample_splits(records: &[ObjectRecord], n: usize, seed: u64) -> Result<Splits> {
    let mut ids = HashSet::new();
    if let Some(dup) = records.iter().find(|r| !ids.insert(r.id.as_str())) {
        return Err(TrainError::Config(format!("object id `{}` appears more than once", dup.id)));
    }
    let mut rng = stream_rng(seed, STREAM_SAMPLING);
    let splits = Splits {
        train: sample_split(records, Split::Train, n, &mut rng)?,
        val: sample_split(records, Split::Val, n, &mut rng)?,
        test: sample_split(records, Split::Test, n, &mut rng)?,
    };
    for s in Split::ALL {
        if splits.get(s).is_empty() {
            return Err(TrainError::EmptySplit(s));
        }
    }
    Ok(splits)
}

pub struct RunResult {
    pub checkpoint: Checkpoint,
    pub log: Vec<EpochMetrics>,
    pub test_acc: f64,
    /// The model holding the selected parameters.
    pub model: Box<dyn Classifier<f64>>,
}

pub fn train_loop(spec: &ModelSpec, splits: &Splits, cfg: &TrainConfig, seed: u64) -> Result<RunResult> {
    train_loop_with(spec, splits, cfg, seed, |_| {})
}

/// [`train_loop`] with a callback after every epoch.
pub fn train_loop_with(
    spec: &ModelSpec,
    splits: &Splits,
    cfg: &TrainConfig,
    seed: u64,
    mut on_epoch: impl FnMut(&EpochMetrics),
) -> Result<RunResult> {
    cfg.validate()?;
    if spec.classes != cfg.classes {
        return Err(TrainError::Config(format!("model has {} classes, config {}", spec.classes, cfg.classes)));
    }
    for s in Split::ALL {
        let items = splits.get(s);
        if items.is_empty() {
            return Err(TrainError::EmptySplit(s));
        }
        if let Some(bad) = items.iter().find(|i| i.label >= cfg.classes || i.points.len() != spec.n) {
            return Err(TrainError::Config(format!(
                "{s} item with label {} and {} points does not fit K={} N={}",
                bad.label,
                bad.points.len(),
                cfg.classes,
                spec.n
            )));
        }
    }
    let mut model = spec.build(&mut stream_rng(seed, STREAM_INIT))?;
    let mut params = model.params();
    let mut state = OptimizerState::new(params.len());
    let mut best = (params.clone(), f64::NEG_INFINITY, 0usize);
    let mut log = Vec::with_capacity(cfg.epochs);
    let train = &splits.train;
    for epoch in 1..=cfg.epochs {
        let mut rng = stream_rng(seed, epoch_stream(epoch));
        let order = random_permutation(train.len(), &mut rng);
        let (mut loss_sum, mut correct) = (0.0, 0usize);
        for (b, chunk) in order.chunks(cfg.batch_size).enumerate() {
            let batch = chunk.iter().map(|&i| augment(&train[i].points, &mut rng, cfg.augment, cfg.sigma_jitter)).collect::<Result<Vec<Vec<Point>>>>()?;
            let labels: Vec<usize> = chunk.iter().map(|&i| train[i].label).collect();
            let (loss, mut grad, logits) = model.loss_and_grad(&batch, &labels)?;
            if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(TrainError::NonFinite { epoch, batch: b, lr: cfg.lr });
            }
            let scale = 1.0 / chunk.len() as f64;
            grad.iter_mut().for_each(|g| *g *= scale);
            adam_step(&mut params, &grad, &mut state, cfg.lr)?;
            model.set_params(&params)?;
            loss_sum += loss;
            correct += logits.iter().zip(&labels).filter(|(z, &l)| argmax(z) == l).count();
        }
        let metrics = EpochMetrics {
            epoch,
            train_loss: loss_sum / train.len() as f64,
            train_acc: correct as f64 / train.len() as f64,
            val_acc: accuracy(model.as_ref(), &splits.val)?,
        };
        if metrics.val_acc > best.1 {
            best = (params.clone(), metrics.val_acc, epoch);
        }
        on_epoch(&metrics);
        log.push(metrics);
    }
    let (best_params, mut best_val, best_epoch) = best;
    model.set_params(&best_params)?;
    if cfg.epochs == 0 {
        best_val = accuracy(model.as_ref(), &splits.val)?;
    }
    let test_acc = accuracy(model.as_ref(), &splits.test)?;
    let checkpoint = Checkpoint {
        spec: *spec,
        config: ConfigEcho {
            lr: cfg.lr,
            batch_size: cfg.batch_size,
            epochs: cfg.epochs,
            sigma_jitter: cfg.sigma_jitter,
            augment: cfg.augment,
            seed,
        },
        params: best_params,
        best_val_acc: best_val,
        epoch: best_epoch,
    };
    Ok(RunResult { checkpoint, log, test_acc, model })
}

/// Learning rates next to `lr` on the search grid.
pub fn adjacent_lrs(lr: f64) -> Vec<f64> {
    match LR_GRID.iter().position(|&g| g == lr) {
        Some(i) => [i.checked_sub(1), Some(i + 1)].into_iter().flatten().filter_map(|j| LR_GRID.get(j).copied()).collect(),
        None => Vec::new(),
    }
}

/// Optional policy for failed runs: when the loss goes non-finite, retry
/// with the adjacent learning rates on the grid, in order.
pub fn train_with_retry(spec: &ModelSpec, splits: &Splits, cfg: &TrainConfig, seed: u64) -> Result<RunResult> {
    let first = train_loop(spec, splits, cfg, seed);
    let Err(err @ TrainError::NonFinite { .. }) = first else {
        return first;
    };
    for lr in adjacent_lrs(cfg.lr) {
        let retry = TrainConfig { lr, ..cfg.clone() };
        match train_loop(spec, splits, &retry, seed) {
            Err(TrainError::NonFinite { .. }) => continue,
            other => return other,
        }
    }
    Err(err)
}

/// Rebuilds a model from a checkpoint.
pub fn model_from_checkpoint(ck: &Checkpoint) -> Result<Box<dyn Classifier<f64>>> {
    let mut model = ck.spec.build(&mut stream_rng(ck.config.seed, STREAM_INIT))?;
    model.set_params(&ck.params)?;
    Ok(model)
}
