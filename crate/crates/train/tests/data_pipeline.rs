use std::fs;

use hyqurp_train::data::{fps, load_manifest, normalize, save_manifest, synth_dataset, Point, ShapeFamily, Split, SynthSpec};
use hyqurp_train::trainer::sample_splits;
use hyqurp_train::TrainError;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dataset(seed: u64) -> Vec<hyqurp_train::data::ObjectRecord> {
    let spec = SynthSpec { classes: vec![ShapeFamily::Cube, ShapeFamily::Disc, ShapeFamily::Cylinder], objects_per_class: 10, candidates: 32, noise: 0.01 };
    synth_dataset(&spec, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

#[test]
fn manifest_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data").join("manifest.csv");
    let recs = dataset(1);
    save_manifest(&path, &recs).unwrap();
    assert_eq!(load_manifest(&path).unwrap(), recs);
    let first = fs::read(&path).unwrap();
    save_manifest(&path, &dataset(1)).unwrap();
    assert_eq!(fs::read(&path).unwrap(), first);
}

#[test]
fn missing_points_file_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("manifest.csv");
    let recs = dataset(2);
    save_manifest(&path, &recs).unwrap();
    let victim = dir.path().join("points").join(format!("{}.txt", recs[3].id));
    fs::remove_file(&victim).unwrap();
    let err = load_manifest(&path).unwrap_err();
    assert!(matches!(&err, TrainError::Io { path, .. } if *path == victim));
    assert!(err.to_string().contains(&format!("{}.txt", recs[3].id)));
}

#[test]
fn unknown_split_reports_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("manifest.csv");
    save_manifest(&path, &dataset(3)).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    lines[4] = lines[4].replace(",train,", ",holdout,");
    fs::write(&path, lines.join("\n")).unwrap();
    match load_manifest(&path) {
        Err(TrainError::Parse { line, msg, .. }) => {
            assert_eq!(line, 5);
            assert!(msg.contains("holdout"));
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn malformed_points_line_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("manifest.csv");
    let recs = dataset(4);
    save_manifest(&path, &recs).unwrap();
    let file = dir.path().join("points").join(format!("{}.txt", recs[0].id));
    fs::write(&file, "0 0 0\n1 2\n").unwrap();
    assert!(matches!(load_manifest(&path), Err(TrainError::Parse { line: 2, .. })));
}

#[test]
fn splits_are_disjoint_and_sampled_items_are_unit_radius() {
    let recs = dataset(5);
    let ids = |s: Split| recs.iter().filter(|r| r.split == s).map(|r| r.id.clone()).collect::<std::collections::HashSet<_>>();
    let (a, b, c) = (ids(Split::Train), ids(Split::Val), ids(Split::Test));
    assert!(a.is_disjoint(&b) && a.is_disjoint(&c) && b.is_disjoint(&c));
    let splits = sample_splits(&recs, 5, 121).unwrap();
    for item in splits.train.iter().chain(&splits.val).chain(&splits.test) {
        let r = item.points.iter().map(|p| p.norm()).fold(0.0, f64::max);
        assert!(r <= 1.0 + 1e-9 && item.points.len() == 5);
    }
    let mut dup = recs.clone();
    dup[1].id = dup[0].id.clone();
    assert!(sample_splits(&dup, 5, 1).is_err());
}

fn cloud(seed: u64, n: usize) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| Point::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0))).collect()
}

proptest! {
    #[test]
    fn normalize_is_idempotent(seed in any::<u64>(), n in 1usize..20) {
        let once = normalize(&cloud(seed, n)).unwrap();
        let twice = normalize(&once).unwrap();
        for (a, b) in once.iter().zip(&twice) {
            prop_assert!(a.distance(*b) < 1e-12);
        }
        let r = once.iter().map(|p| p.norm()).fold(0.0, f64::max);
        prop_assert!(n == 1 || (r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fps_is_a_duplicate_free_subset(seed in any::<u64>(), m in 1usize..40, n in 1usize..10) {
        let cands = cloud(seed, m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let out = fps(&cands, n, &mut rng).unwrap();
        prop_assert_eq!(out.len(), n);
        prop_assert!(out.iter().all(|p| cands.contains(p)));
        if m >= n {
            for i in 0..n {
                for j in i + 1..n {
                    prop_assert!(out[i] != out[j]);
                }
            }
        }
    }
}
