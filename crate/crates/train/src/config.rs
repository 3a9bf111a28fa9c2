use hyqurp_core::circuit::{CircuitConfig, DEFAULT_BLOCKS};
use hyqurp_core::encoder::DEFAULT_THETA;
use hyqurp_core::head::{HeadConfig, Mlp, Profile};
use hyqurp_core::model::{Classifier, HybridModel, MlpBaseline, SetMlp, MLP_HIDDEN};
use rand::Rng;

use crate::augment::AugmentFlags;
use crate::error::{Result, TrainError};

pub const DEFAULT_SEEDS: [u64; 7] = [121, 831, 1557, 2023, 2024, 2025, 2026];

/// Learning-rate grid searched for the real-data protocol.
pub const LR_GRID: [f64; 3] = [1e-2, 1e-3, 1e-4];

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub lr: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub sigma_jitter: f64,
    pub augment: AugmentFlags,
    pub seeds: Vec<u64>,
    pub classes: usize,
}

impl TrainConfig {
    pub fn new(lr: f64, classes: usize) -> Self {
        TrainConfig { lr, batch_size: 35, epochs: 1000, sigma_jitter: 0.02, augment: AugmentFlags::ALL, seeds: DEFAULT_SEEDS.to_vec(), classes }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(TrainError::Config(m));
        if !(self.lr >= 0.0 && self.lr.is_finite()) {
            return bad(format!("lr must be finite and non-negative, got {}", self.lr));
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1".into());
        }
        if !(self.sigma_jitter >= 0.0 && self.sigma_jitter.is_finite()) {
            return bad(format!("sigma_jitter must be finite and non-negative, got {}", self.sigma_jitter));
        }
        if self.classes < 2 {
            return bad("need ≥ 2 classes".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Hybrid,
    SetMlp,
    Mlp,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Hybrid => "hybrid",
            ModelKind::SetMlp => "set-mlp",
            ModelKind::Mlp => "mlp",
        })
    }
}

impl std::str::FromStr for ModelKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "hybrid" => Ok(ModelKind::Hybrid),
            "set-mlp" => Ok(ModelKind::SetMlp),
            "mlp" => Ok(ModelKind::Mlp),
            _ => Err(format!("unknown model `{s}`")),
        }
    }
}

/// Everything needed to rebuild a model's shapes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub n: usize,
    pub blocks: usize,
    pub theta: f64,
    pub profile: Profile,
    pub classes: usize,
}

impl ModelSpec {
    pub fn hybrid(n: usize, profile: Profile, classes: usize) -> Self {
        ModelSpec { kind: ModelKind::Hybrid, n, blocks: DEFAULT_BLOCKS, theta: DEFAULT_THETA, profile, classes }
    }

    pub fn with_kind(self, kind: ModelKind) -> Self {
        ModelSpec { kind, ..self }
    }

    pub fn head(&self) -> Result<HeadConfig> {
        Ok(HeadConfig::profile(self.profile, self.classes)?)
    }

    /// Freshly initialised model.
    pub fn build<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Box<dyn Classifier<f64>>> {
        Ok(match self.kind {
            ModelKind::Hybrid => Box::new(HybridModel::new(CircuitConfig::new(self.n, self.blocks, self.theta)?, &self.head()?, rng)?),
            ModelKind::SetMlp => Box::new(SetMlp::new(self.n, &self.head()?, rng)?),
            ModelKind::Mlp => Box::new(MlpBaseline::new(self.n, self.classes, rng)?),
        })
    }

    /// Flat parameter count, from shapes alone.
    pub fn n_params(&self) -> Result<usize> {
        if self.n < 2 {
            return Err(TrainError::Config(format!("N must be at least 2, got {}", self.n)));
        }
        Ok(match self.kind {
            ModelKind::Hybrid => 2 * self.blocks * (self.n - 1) + self.head()?.n_params(),
            ModelKind::SetMlp => 8 + self.head()?.n_params(),
            ModelKind::Mlp => {
                let mut widths = vec![3 * self.n];
                widths.extend(MLP_HIDDEN);
                widths.push(self.classes);
                Mlp::new(widths, true)?.n_params()
            }
        })
    }

    /// `pre=2-4-4;post=24-24-5` style summary of the head widths.
    pub fn widths(&self) -> Result<String> {
        let head = self.head()?;
        let join = |w: &[usize]| w.iter().map(usize::to_string).collect::<Vec<_>>().join("-");
        Ok(format!("pre={};post={}", join(head.pre().widths()), join(head.post().widths())))
    }
}
