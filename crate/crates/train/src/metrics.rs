//! Evaluation: accuracy, logit invariance under random rotation and
//! permutation, and seed summaries.

use hyqurp_core::group::Rotation3;
use hyqurp_core::model::Classifier;
use hyqurp_core::random::{random_permutation, random_rotation, rotate};
use rand::Rng;

use crate::data::{Point, SampledItem};
use crate::error::{Result, TrainError};

/// Top-1 accuracy; ties between logits go to the lowest class index.
pub fn accuracy(model: &dyn Classifier<f64>, items: &[SampledItem]) -> Result<f64> {
    if items.is_empty() {
        return Err(TrainError::Config("accuracy over an empty set".into()));
    }
    let batch: Vec<Vec<Point>> = items.iter().map(|i| i.points.clone()).collect();
    let logits = model.logits_batch(&batch)?;
    let correct = logits.iter().zip(items).filter(|(z, it)| argmax(z) == it.label).count();
    Ok(correct as f64 / items.len() as f64)
}

pub fn argmax(z: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in z.iter().enumerate() {
        if v > z[best] {
            best = i;
        }
    }
    best
}

/// `(cos(z, z'), |z'| / |z|)`.
pub fn cosine_and_ratio(z: &[f64], zp: &[f64]) -> (f64, f64) {
    let dot: f64 = z.iter().zip(zp).map(|(a, b)| a * b).sum();
    let a: f64 = z.iter().map(|v| v * v).sum();
    let b: f64 = zp.iter().map(|v| v * v).sum();
    (dot / (a * b).sqrt(), (b / a).sqrt())
}

/// Rotates every point, then moves point `i` to slot `perm[i]`.
pub fn transform(points: &[Point], rot: &Rotation3<f64>, perm: &[usize]) -> Vec<Point> {
    let mut out = points.to_vec();
    for (i, &j) in perm.iter().enumerate() {
        out[j] = rotate(rot, points[i]);
    }
    out
}

/// Logit invariance for one given transformation.
pub fn invariance_under(model: &dyn Classifier<f64>, points: &[Point], rot: &Rotation3<f64>, perm: &[usize]) -> Result<(f64, f64)> {
    if perm.len() != points.len() {
        return Err(TrainError::Config(format!("permutation of {} for {} points", perm.len(), points.len())));
    }
    let z = model.logits_batch(&[points.to_vec(), transform(points, rot, perm)])?;
    Ok(cosine_and_ratio(&z[0], &z[1]))
}

/// Draws a Haar rotation and a uniform permutation and compares logits.
pub fn invariance_metrics<R: Rng + ?Sized>(model: &dyn Classifier<f64>, points: &[Point], rng: &mut R) -> Result<(f64, f64)> {
    let (rot, _) = random_rotation::<f64, _>(rng);
    let perm = random_permutation(points.len(), rng);
    invariance_under(model, points, &rot, &perm)
}

/// Mean and Bessel-corrected standard deviation (0 for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ModelKind, ModelSpec};
    use hyqurp_core::head::Profile;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const IDENTITY: Rotation3<f64> = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

    fn cloud(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point> {
        (0..n).map(|_| Point::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5))).collect()
    }

    #[test]
    fn identity_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for kind in [ModelKind::Hybrid, ModelKind::Mlp] {
            let model = ModelSpec::hybrid(3, Profile::Light, 3).with_kind(kind).build(&mut rng).unwrap();
            let p = cloud(&mut rng, 3);
            assert_eq!(invariance_under(model.as_ref(), &p, &IDENTITY, &[0, 1, 2]).unwrap(), (1.0, 1.0));
        }
    }

    #[test]
    fn hybrid_is_invariant_and_mlp_is_not() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let spec = ModelSpec::hybrid(4, Profile::Light, 3);
        let hybrid = spec.build(&mut rng).unwrap();
        let mlp = spec.with_kind(ModelKind::Mlp).build(&mut rng).unwrap();
        let p = cloud(&mut rng, 4);
        let mut worst_mlp: f64 = 1.0;
        for _ in 0..10 {
            let (c, r) = invariance_metrics(hybrid.as_ref(), &p, &mut rng).unwrap();
            assert!((c - 1.0).abs() < 1e-6 && (r - 1.0).abs() < 1e-6);
            worst_mlp = worst_mlp.min(invariance_metrics(mlp.as_ref(), &p, &mut rng).unwrap().0);
        }
        assert!(worst_mlp < 0.999);
    }

    #[test]
    fn summaries() {
        assert_eq!(mean_std(&[0.5]), (0.5, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(argmax(&[0.1, 0.3, 0.3]), 1);
        assert_eq!(cosine_and_ratio(&[1.0, 0.0], &[0.0, 2.0]), (0.0, 2.0));
    }
}
