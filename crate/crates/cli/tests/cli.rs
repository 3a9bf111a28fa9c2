use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hyqurp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyqurp")).args(args).env_remove("HYQURP_OUT").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn gen_small(dir: &Path, per_class: &str) -> Output {
    let o = hyqurp(&["gen-data", "--objects-per-class", per_class, "--candidates", "24", "--seed", "5", "--out", dir.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    o
}

#[test]
fn gen_data_splits_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let o = hyqurp(&["gen-data", "--classes", "sphere,simplex", "--objects-per-class", "100", "--candidates", "16", "--seed", "7", "--out", dir.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(stdout(&o).contains("sphere        70    10    20"), "{}", stdout(&o));
    }
    let manifest = fs::read_to_string(a.join("manifest.csv")).unwrap();
    for label in ["0", "1"] {
        for (split, want) in [("train", 70), ("val", 10), ("test", 20)] {
            let got = manifest.lines().filter(|l| l.split(',').nth(1) == Some(label) && l.split(',').nth(2) == Some(split)).count();
            assert_eq!(got, want, "label {label} split {split}");
        }
    }
    assert_eq!(fs::read(a.join("manifest.csv")).unwrap(), fs::read(b.join("manifest.csv")).unwrap());
    for entry in fs::read_dir(a.join("points")).unwrap() {
        let entry = entry.unwrap();
        assert_eq!(fs::read(entry.path()).unwrap(), fs::read(b.join("points").join(entry.file_name())).unwrap());
    }
}

#[test]
fn one_class_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = hyqurp(&["gen-data", "--classes", "sphere", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("need ≥ 2 classes"));
}

#[test]
fn train_writes_one_directory_per_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    gen_small(&data, "10");
    let out = tmp.path().join("runs");
    let manifest = data.join("manifest.csv");
    let o = hyqurp(&[
        "train", "--manifest", manifest.to_str().unwrap(), "--n", "4", "--b", "12", "--theta", "1.7", "--profile", "light", "--epochs", "100",
        "--lr", "0.003", "--seeds", "121,831", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("test accuracy over 2 seed(s)"));
    let dirs: Vec<_> = fs::read_dir(&out).unwrap().map(|e| e.unwrap()).filter(|e| e.path().is_dir()).collect();
    assert_eq!(dirs.len(), 2);
    for seed in ["121", "831"] {
        let run = out.join(format!("seed-{seed}"));
        for f in ["checkpoint.txt", "metrics.csv", "config.txt"] {
            assert!(run.join(f).is_file(), "{f} missing for seed {seed}");
        }
        let metrics = fs::read_to_string(run.join("metrics.csv")).unwrap();
        assert_eq!(metrics.lines().count(), 101);
        assert!(fs::read_to_string(run.join("config.txt")).unwrap().contains(&format!("seed={seed}")));
    }
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);

    // evaluation of the first run
    let ck = out.join("seed-121").join("checkpoint.txt");
    let o = hyqurp(&["eval", "--checkpoint", ck.to_str().unwrap(), "--manifest", manifest.to_str().unwrap(), "--transforms", "20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("cosine 1.000000") && text.contains("ratio  1.000000"), "{text}");
    for line in text.lines().filter(|l| l.contains("max |1 -")) {
        let dev: f64 = line.rsplit(' ').next().unwrap().trim_end_matches(')').parse().unwrap();
        assert!(dev <= 1e-6, "{line}");
    }

    let o = hyqurp(&["eval", "--checkpoint", ck.to_str().unwrap(), "--manifest", manifest.to_str().unwrap(), "--transforms", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("test accuracy:"));
    assert!(!stdout(&o).contains("invariance"));

    let text = fs::read_to_string(&ck).unwrap();
    let bad = tmp.path().join("bad.txt");
    fs::write(&bad, text.replacen("theta=", "theta=abc", 1)).unwrap();
    let o = hyqurp(&["eval", "--checkpoint", bad.to_str().unwrap(), "--manifest", manifest.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`theta`"), "{}", stderr(&o));
}

#[test]
fn zero_lr_keeps_accuracy_constant() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    gen_small(&data, "10");
    let out = tmp.path().join("runs");
    let o = hyqurp(&[
        "train", "--manifest", data.join("manifest.csv").to_str().unwrap(), "--n", "3", "--b", "2", "--epochs", "5", "--lr", "0",
        "--seeds", "3", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let metrics = fs::read_to_string(out.join("seed-3").join("metrics.csv")).unwrap();
    let vals: Vec<&str> = metrics.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(vals.len(), 5);
    assert!(vals.iter().all(|v| *v == vals[0]), "{metrics}");
}

#[test]
fn config_file_env_and_flags_resolve_in_order() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    gen_small(&data, "10");
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, format!("# small run\nmanifest={}\nepochs=2\nlr=0.5\nn=3\nb=1\nseeds=9\nout={}\n", data.join("manifest.csv").display(), tmp.path().join("from-file").display())).unwrap();
    let env_out = tmp.path().join("from-env");
    let o = Command::new(env!("CARGO_BIN_EXE_hyqurp"))
        .args(["train", "--config", cfg.to_str().unwrap(), "--lr", "0.01"])
        .env("HYQURP_OUT", &env_out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(!tmp.path().join("from-file").exists());
    let echoed = fs::read_to_string(env_out.join("config.txt")).unwrap();
    for line in ["lr=0.01", "epochs=2", "n=3", "b=1", "seeds=9", "batch_size=35", "k_classes=3"] {
        assert!(echoed.lines().any(|l| l == line), "{line} not in\n{echoed}");
    }
    // the echo is itself a valid config
    let again = tmp.path().join("again");
    let o = hyqurp(&["train", "--config", env_out.join("config.txt").to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(fs::read(env_out.join("seed-9").join("checkpoint.txt")).unwrap(), fs::read(again.join("seed-9").join("checkpoint.txt")).unwrap());

    fs::write(&cfg, "epochz=3\n").unwrap();
    let o = hyqurp(&["train", "--config", cfg.to_str().unwrap(), "--manifest", "x.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("epochz"));
}

#[test]
fn usage_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    gen_small(&data, "10");
    let m = data.join("manifest.csv");
    for args in [
        vec!["train", "--manifest", m.to_str().unwrap(), "--n", "7"],
        vec!["train", "--manifest", m.to_str().unwrap(), "--lr", "-1"],
        vec!["train"],
        vec!["train", "--bogus"],
        vec!["verify", "--n-min", "3", "--n-max", "2"],
    ] {
        let o = hyqurp(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
    let o = hyqurp(&["train", "--manifest", tmp.path().join("missing.csv").to_str().unwrap(), "--k-classes", "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_small_range_and_fault_injection() {
    let start = std::time::Instant::now();
    let o = hyqurp(&["verify", "--n-max", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(start.elapsed().as_secs() < 10);
    assert!(stdout(&o).contains("all 11 checks passed"));

    let o = hyqurp(&["verify", "--n-max", "3", "--inject-fault"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("PASS") && l.contains("generator-hermiticity")));
    assert!(text.lines().any(|l| l.starts_with("FAIL") && l.contains("pair-equivariance")));
    assert!(stderr(&o).contains("pair-equivariance"));
}
