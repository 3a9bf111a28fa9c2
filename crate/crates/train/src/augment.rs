//! Training-time augmentation: rotation, then permutation, then jitter.

use hyqurp_core::random::{random_permutation, random_rotation, rotate};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::Point;
use crate::error::{Result, TrainError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AugmentFlags {
    pub rotation: bool,
    pub permutation: bool,
    pub jitter: bool,
}

impl AugmentFlags {
    pub const ALL: Self = AugmentFlags { rotation: true, permutation: true, jitter: true };
    pub const NONE: Self = AugmentFlags { rotation: false, permutation: false, jitter: false };
}

impl std::fmt::Display for AugmentFlags {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let on: Vec<&str> = [(self.rotation, "rotation"), (self.permutation, "permutation"), (self.jitter, "jitter")]
            .into_iter()
            .filter_map(|(b, s)| b.then_some(s))
            .collect();
        if on.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&on.join(","))
        }
    }
}

impl std::str::FromStr for AugmentFlags {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let mut flags = AugmentFlags::NONE;
        if s == "none" {
            return Ok(flags);
        }
        for tok in s.split(',') {
            match tok.trim() {
                "rotation" => flags.rotation = true,
                "permutation" => flags.permutation = true,
                "jitter" => flags.jitter = true,
                other => return Err(format!("unknown augmentation `{other}`")),
            }
        }
        Ok(flags)
    }
}

/// Haar rotation, uniform point permutation, then Gaussian jitter of standard
/// deviation `sigma` per coordinate, each only when its flag is set.
pub fn augment<R: Rng + ?Sized>(points: &[Point], rng: &mut R, flags: AugmentFlags, sigma: f64) -> Result<Vec<Point>> {
    if points.iter().any(|p| !p.is_finite()) {
        return Err(TrainError::Config("augment: non-finite point".into()));
    }
    let mut out = points.to_vec();
    if flags.rotation {
        let (r, _) = random_rotation::<f64, _>(rng);
        out.iter_mut().for_each(|p| *p = rotate(&r, *p));
    }
    if flags.permutation {
        let perm = random_permutation(out.len(), rng);
        let src = out.clone();
        for (i, &j) in perm.iter().enumerate() {
            out[j] = src[i];
        }
    }
    if flags.jitter {
        for p in &mut out {
            let n = Point::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
            *p = p.add(n.scale(sigma));
        }
    }
    Ok(out)
}
