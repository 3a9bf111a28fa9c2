//! Text checkpoints and metric logs.
//!
//! A checkpoint is a block of `key=value` header lines, then one section per
//! parameter group: a line `[name] count` followed by `count` values, one per
//! line. Hybrid models store `quantum` (block-major, `k` ascending, `+` before
//! `-`) then `head`; Set-MLP stores `input_map` then `head`; the plain MLP
//! stores `mlp`. Values print in shortest round-trip form, so a reload is
//! bit-exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use hyqurp_core::head::Profile;

use crate::augment::AugmentFlags;
use crate::config::{ModelKind, ModelSpec};
use crate::error::{io_err, Result, TrainError};

pub const FORMAT_VERSION: u32 = 1;

/// Conventions a parameter vector depends on.
pub const CONVENTION: &str = "wire0-msb;blocks=k-asc,plus-first;stats=mean,max,min,sum,var,std";

/// Training settings echoed into the checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigEcho {
    pub lr: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub sigma_jitter: f64,
    pub augment: AugmentFlags,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub spec: ModelSpec,
    pub config: ConfigEcho,
    pub params: Vec<f64>,
    pub best_val_acc: f64,
    /// 1-based epoch of the retained parameters; 0 means untrained.
    pub epoch: usize,
}

fn sections(spec: &ModelSpec) -> Result<Vec<(&'static str, usize)>> {
    let total = spec.n_params()?;
    Ok(match spec.kind {
        ModelKind::Hybrid => {
            let q = 2 * spec.blocks * (spec.n - 1);
            vec![("quantum", q), ("head", total - q)]
        }
        ModelKind::SetMlp => vec![("input_map", 8), ("head", total - 8)],
        ModelKind::Mlp => vec![("mlp", total)],
    })
}

impl Checkpoint {
    pub fn to_text(&self) -> Result<String> {
        let s = &self.spec;
        let c = &self.config;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| writeln!(out, "{k}={v}").expect("string write");
        kv("format_version", FORMAT_VERSION.to_string());
        kv("convention", CONVENTION.into());
        kv("model", s.kind.to_string());
        kv("N", s.n.to_string());
        kv("B", s.blocks.to_string());
        kv("theta", s.theta.to_string());
        kv("K", s.classes.to_string());
        kv("profile", s.profile.to_string());
        kv("widths", s.widths()?);
        kv("lr", c.lr.to_string());
        kv("batch_size", c.batch_size.to_string());
        kv("epochs", c.epochs.to_string());
        kv("sigma_jitter", c.sigma_jitter.to_string());
        kv("augment", c.augment.to_string());
        kv("seed", c.seed.to_string());
        kv("best_val_acc", self.best_val_acc.to_string());
        kv("epoch", self.epoch.to_string());
        let layout = sections(s)?;
        let want: usize = layout.iter().map(|l| l.1).sum();
        if want != self.params.len() {
            return Err(TrainError::Checkpoint { field: "params".into(), msg: format!("{} values for a model with {want}", self.params.len()) });
        }
        let mut rest = self.params.as_slice();
        for (name, len) in layout {
            let (head, tail) = rest.split_at(len);
            writeln!(out, "[{name}] {}", head.len()).expect("string write");
            for v in head {
                writeln!(out, "{v}").expect("string write");
            }
            rest = tail;
        }
        Ok(out)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let err = |field: &str, msg: String| TrainError::Checkpoint { field: field.into(), msg };
        let mut lines = text.lines().peekable();
        let mut header = std::collections::HashMap::new();
        while let Some(line) = lines.next_if(|l| !l.starts_with('[')) {
            let (k, v) = line.split_once('=').ok_or_else(|| err("header", format!("expected key=value, got `{line}`")))?;
            header.insert(k.to_string(), v.to_string());
        }
        let get = |k: &str| header.get(k).map(String::as_str).ok_or_else(|| err(k, "missing".into()));
        fn parse<V: std::str::FromStr>(field: &str, s: &str) -> Result<V>
        where
            V::Err: std::fmt::Display,
        {
            s.parse::<V>().map_err(|e| TrainError::Checkpoint { field: field.into(), msg: format!("`{s}`: {e}") })
        }
        let version: u32 = parse("format_version", get("format_version")?)?;
        if version != FORMAT_VERSION {
            return Err(err("format_version", format!("unsupported version {version}")));
        }
        if get("convention")? != CONVENTION {
            return Err(err("convention", format!("unknown convention `{}`", get("convention")?)));
        }
        let spec = ModelSpec {
            kind: parse("model", get("model")?)?,
            n: parse("N", get("N")?)?,
            blocks: parse("B", get("B")?)?,
            theta: parse("theta", get("theta")?)?,
            profile: parse::<Profile>("profile", get("profile")?)?,
            classes: parse("K", get("K")?)?,
        };
        if spec.n < 2 {
            return Err(err("N", format!("must be at least 2, got {}", spec.n)));
        }
        let widths = spec.widths().map_err(|e| err("profile", e.to_string()))?;
        if get("widths")? != widths {
            return Err(err("widths", format!("`{}` does not match the profile ({widths})", get("widths")?)));
        }
        let config = ConfigEcho {
            lr: parse("lr", get("lr")?)?,
            batch_size: parse("batch_size", get("batch_size")?)?,
            epochs: parse("epochs", get("epochs")?)?,
            sigma_jitter: parse("sigma_jitter", get("sigma_jitter")?)?,
            augment: parse("augment", get("augment")?)?,
            seed: parse("seed", get("seed")?)?,
        };
        let best_val_acc = parse("best_val_acc", get("best_val_acc")?)?;
        let epoch = parse("epoch", get("epoch")?)?;
        let mut params = Vec::new();
        let mut seen = Vec::new();
        while let Some(line) = lines.next() {
            let body = line.strip_prefix('[').ok_or_else(|| err("params", format!("expected a section header, got `{line}`")))?;
            let (name, count) = body.split_once("] ").ok_or_else(|| err("params", format!("malformed section header `{line}`")))?;
            let count: usize = parse(name, count)?;
            for i in 0..count {
                let v = lines.next().ok_or_else(|| err(name, format!("truncated after {i} of {count} values")))?;
                let x: f64 = parse(name, v)?;
                if !x.is_finite() {
                    return Err(err(name, format!("value {i} is not finite")));
                }
                params.push(x);
            }
            seen.push((name.to_string(), count));
        }
        let want: Vec<(String, usize)> = sections(&spec).map_err(|e| err("profile", e.to_string()))?.into_iter().map(|(n, c)| (n.to_string(), c)).collect();
        if seen != want {
            return Err(err("params", format!("sections {seen:?} do not match the model ({want:?})")));
        }
        Ok(Checkpoint { spec, config, params, best_val_acc, epoch })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()?).map_err(io_err(path))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(&fs::read_to_string(path).map_err(io_err(path))?)
    }
}

/// One row of the per-epoch metric log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub val_acc: f64,
}

pub fn metrics_csv(log: &[EpochMetrics]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| TrainError::Config(format!("metrics csv: {e}"));
    w.write_record(["epoch", "train_loss", "train_acc", "val_acc"]).map_err(fail)?;
    for m in log {
        w.write_record([m.epoch.to_string(), m.train_loss.to_string(), m.train_acc.to_string(), m.val_acc.to_string()]).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| TrainError::Config(format!("metrics csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("ascii csv"))
}

pub fn write_metrics_csv(path: &Path, log: &[EpochMetrics]) -> Result<()> {
    fs::write(path, metrics_csv(log)?).map_err(io_err(path))
}
