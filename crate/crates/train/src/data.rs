//! Point-set ingestion: normalisation, farthest point sampling, the
//! synthetic shape families, and the manifest/points-file format.
//!
//! A manifest is a CSV with header `id,label,split,points_path`; each points
//! file holds one `x y z` triple per line. Paths are relative to the manifest.

use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use hyqurp_core::encoder::Point3;
use hyqurp_core::random::{random_permutation, random_rotation, rotate};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{io_err, Result, TrainError};

pub type Point = Point3<f64>;

/// Radius at or below which a point set counts as a single point.
pub const DEGENERATE_RADIUS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        })
    }
}

impl FromStr for Split {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            _ => Err(format!("unknown split `{s}`")),
        }
    }
}

/// One object: its dense candidate pool, class and split.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectRecord {
    pub id: String,
    pub label: usize,
    pub split: Split,
    pub candidates: Vec<Point>,
}

/// Exactly `N` normalised points with their label.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledItem {
    pub points: Vec<Point>,
    pub label: usize,
}

/// Centre on the centroid and scale to unit maximum radius. A set whose
/// points all coincide comes back centred but unscaled.
pub fn normalize(points: &[Point]) -> Result<Vec<Point>> {
    if points.is_empty() {
        return Err(TrainError::Config("cannot normalize an empty point set".into()));
    }
    let inv = 1.0 / points.len() as f64;
    let centroid = points.iter().fold(Point::default(), |acc, &p| acc.add(p)).scale(inv);
    let centred: Vec<Point> = points.iter().map(|&p| p.sub(centroid)).collect();
    let radius = centred.iter().map(|p| p.norm()).fold(0.0, f64::max);
    if radius <= DEGENERATE_RADIUS {
        return Ok(centred);
    }
    Ok(centred.into_iter().map(|p| p.scale(1.0 / radius)).collect())
}

/// Farthest point sampling from a given start index. Returns candidate
/// indices; ties go to the lowest index. Stops early when the pool runs out.
pub fn fps_from_seed(candidates: &[Point], n: usize, seed: usize) -> Vec<usize> {
    let m = candidates.len();
    let mut chosen = Vec::with_capacity(n.min(m));
    if m == 0 || n == 0 {
        return chosen;
    }
    let mut dist = vec![f64::INFINITY; m];
    let mut next = seed;
    while chosen.len() < n.min(m) {
        chosen.push(next);
        dist[next] = f64::NEG_INFINITY;
        let c = candidates[next];
        let mut best = None::<(usize, f64)>;
        for (i, d) in dist.iter_mut().enumerate() {
            if *d == f64::NEG_INFINITY {
                continue;
            }
            *d = d.min(candidates[i].distance(c));
            if best.is_none_or(|(_, b)| *d > b) {
                best = Some((i, *d));
            }
        }
        match best {
            Some((i, _)) => next = i,
            None => break,
        }
    }
    chosen
}

/// Farthest point sampling with a uniformly random start. When the pool is
/// smaller than `n` every candidate is taken once, and the remainder is drawn
/// uniformly from the pool in rounds without replacement.
pub fn fps<R: Rng + ?Sized>(candidates: &[Point], n: usize, rng: &mut R) -> Result<Vec<Point>> {
    if candidates.is_empty() {
        return Err(TrainError::Config("cannot sample from an empty candidate set".into()));
    }
    let seed = rng.random_range(0..candidates.len());
    let mut idx = fps_from_seed(candidates, n, seed);
    while idx.len() < n {
        let round = random_permutation(candidates.len(), rng);
        idx.extend(round.into_iter().take(n - idx.len()));
    }
    Ok(idx.into_iter().map(|i| candidates[i]).collect())
}

/// Normalise the pool, subsample `n` points, and normalise the result.
pub fn sample_item<R: Rng + ?Sized>(record: &ObjectRecord, n: usize, rng: &mut R) -> Result<SampledItem> {
    let pool = normalize(&record.candidates)?;
    let points = normalize(&fps(&pool, n, rng)?)?;
    Ok(SampledItem { points, label: record.label })
}

/// Samples every record of one split, in record order.
pub fn sample_split<R: Rng + ?Sized>(records: &[ObjectRecord], split: Split, n: usize, rng: &mut R) -> Result<Vec<SampledItem>> {
    records.iter().filter(|r| r.split == split).map(|r| sample_item(r, n, rng)).collect()
}

/// Parameterised surface families for the synthetic suite. Each is centred
/// with unit maximum radius before noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeFamily {
    /// unit sphere shell
    Sphere,
    /// surface of the axis-aligned cube `[-1, 1]^3 / sqrt 3`
    Cube,
    /// lateral surface of a cylinder of radius 0.2 along z
    Cylinder,
    /// flat unit disc in the xy-plane
    Disc,
    /// vertices of a regular tetrahedron
    Simplex,
}

impl ShapeFamily {
    pub const ALL: [ShapeFamily; 5] = [Self::Sphere, Self::Cube, Self::Cylinder, Self::Disc, Self::Simplex];

    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> Point {
        let g = |rng: &mut R| rng.sample::<f64, _>(StandardNormal);
        match self {
            Self::Sphere => loop {
                let p = Point::new(g(rng), g(rng), g(rng));
                let r = p.norm();
                if r > 1e-9 {
                    return p.scale(1.0 / r);
                }
            },
            Self::Cube => {
                let mut v = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
                let face = rng.random_range(0..6);
                v[face / 2] = if face % 2 == 0 { 1.0 } else { -1.0 };
                Point::from_array(v).scale(1.0 / 3f64.sqrt())
            }
            Self::Cylinder => {
                let r = 0.2f64;
                let h = (1.0 - r * r).sqrt();
                let a = rng.random_range(0.0..std::f64::consts::TAU);
                Point::new(r * a.cos(), r * a.sin(), rng.random_range(-h..h))
            }
            Self::Disc => {
                let r = rng.random::<f64>().sqrt();
                let a = rng.random_range(0.0..std::f64::consts::TAU);
                Point::new(r * a.cos(), r * a.sin(), 0.0)
            }
            Self::Simplex => {
                let s = 1.0 / 3f64.sqrt();
                let v = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
                Point::from_array(v[rng.random_range(0..4)])
            }
        }
    }
}

impl fmt::Display for ShapeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Sphere => "sphere",
            Self::Cube => "cube",
            Self::Cylinder => "cylinder",
            Self::Disc => "disc",
            Self::Simplex => "simplex",
        })
    }
}

impl FromStr for ShapeFamily {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL.into_iter().find(|f| f.to_string() == s).ok_or_else(|| format!("unknown shape family `{s}`"))
    }
}

/// Candidates per synthetic object.
pub const DEFAULT_CANDIDATES: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub classes: Vec<ShapeFamily>,
    pub objects_per_class: usize,
    pub candidates: usize,
    /// per-coordinate Gaussian noise on every candidate
    pub noise: f64,
}

impl SynthSpec {
    pub fn new(classes: Vec<ShapeFamily>, objects_per_class: usize) -> Self {
        SynthSpec { classes, objects_per_class, candidates: DEFAULT_CANDIDATES, noise: 0.0 }
    }
}

/// Per-class `(train, val, test)` counts: `floor(7n/10)`, `floor(n/10)` and
/// the rest.
pub fn split_counts(n: usize) -> (usize, usize, usize) {
    let train = 7 * n / 10;
    let val = n / 10;
    (train, val, n - train - val)
}

/// Generates the synthetic dataset. Every object gets its own random
/// rotation, so the class is a property of the shape alone.
pub fn synth_dataset<R: Rng + ?Sized>(spec: &SynthSpec, rng: &mut R) -> Result<Vec<ObjectRecord>> {
    if spec.classes.len() < 2 {
        return Err(TrainError::Config("need ≥ 2 classes".into()));
    }
    if spec.objects_per_class == 0 || spec.candidates == 0 {
        return Err(TrainError::Config("objects per class and candidates must be positive".into()));
    }
    if !(spec.noise >= 0.0 && spec.noise.is_finite()) {
        return Err(TrainError::Config(format!("noise must be finite and non-negative, got {}", spec.noise)));
    }
    let (train, val, _) = split_counts(spec.objects_per_class);
    let mut out = Vec::with_capacity(spec.classes.len() * spec.objects_per_class);
    for (label, family) in spec.classes.iter().enumerate() {
        for o in 0..spec.objects_per_class {
            let (rot, _) = random_rotation::<f64, _>(rng);
            let candidates = (0..spec.candidates)
                .map(|_| {
                    let p = family.sample(rng);
                    let jitter = Point::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
                    rotate(&rot, p.add(jitter.scale(spec.noise)))
                })
                .collect();
            let split = if o < train {
                Split::Train
            } else if o < train + val {
                Split::Val
            } else {
                Split::Test
            };
            out.push(ObjectRecord { id: format!("{family}-{o:04}"), label, split, candidates });
        }
    }
    Ok(out)
}

fn points_path(id: &str) -> PathBuf {
    Path::new("points").join(format!("{id}.txt"))
}

/// Writes the manifest and one points file per record under
/// `<manifest dir>/points/`.
pub fn save_manifest(path: &Path, records: &[ObjectRecord]) -> Result<()> {
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    fs::create_dir_all(dir.join("points")).map_err(io_err(dir.join("points")))?;
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(["id", "label", "split", "points_path"]).map_err(|e| csv_err(path, e))?;
    for r in records {
        if r.id.is_empty() || r.id.contains(['/', '\\']) {
            return Err(TrainError::Config(format!("object id `{}` is not a valid file stem", r.id)));
        }
        let rel = points_path(&r.id);
        let label = r.label.to_string();
        let split = r.split.to_string();
        w.write_record([r.id.as_str(), &label, &split, &rel.to_string_lossy()]).map_err(|e| csv_err(path, e))?;
        let file = dir.join(&rel);
        let mut out = BufWriter::new(fs::File::create(&file).map_err(io_err(&file))?);
        for p in &r.candidates {
            writeln!(out, "{} {} {}", p.x, p.y, p.z).map_err(io_err(&file))?;
        }
        out.flush().map_err(io_err(&file))?;
    }
    w.flush().map_err(io_err(path))
}

fn csv_err(path: &Path, e: csv::Error) -> TrainError {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    TrainError::Parse { path: path.to_path_buf(), line, msg: e.to_string() }
}

/// Parses a points file: one whitespace-separated `x y z` per non-empty line.
pub fn read_points(path: &Path) -> Result<Vec<Point>> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |msg: String| TrainError::Parse { path: path.to_path_buf(), line: i + 1, msg };
        let v: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| parse_err(format!("`{t}`: {e}"))))
            .collect::<Result<_>>()?;
        let [x, y, z] = v[..] else {
            return Err(parse_err(format!("expected 3 coordinates, found {}", v.len())));
        };
        let p = Point::new(x, y, z);
        if !p.is_finite() {
            return Err(parse_err("non-finite coordinate".into()));
        }
        out.push(p);
    }
    if out.is_empty() {
        return Err(TrainError::Parse { path: path.to_path_buf(), line: 0, msg: "no points".into() });
    }
    Ok(out)
}

pub fn load_manifest(path: &Path) -> Result<Vec<ObjectRecord>> {
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut rdr = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => TrainError::Io { path: path.to_path_buf(), source: std::io::Error::other(e.to_string()) },
        _ => csv_err(path, e),
    })?;
    let header = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    if header.iter().collect::<Vec<_>>() != ["id", "label", "split", "points_path"] {
        return Err(TrainError::Parse { path: path.to_path_buf(), line: 1, msg: "expected header `id,label,split,points_path`".into() });
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let err = |msg: String| TrainError::Parse { path: path.to_path_buf(), line, msg };
        let label = rec[1].parse::<usize>().map_err(|e| err(format!("label `{}`: {e}", &rec[1])))?;
        let split = rec[2].parse::<Split>().map_err(err)?;
        let candidates = read_points(&dir.join(&rec[3]))?;
        out.push(ObjectRecord { id: rec[0].to_string(), label, split, candidates });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pts(v: &[[f64; 3]]) -> Vec<Point> {
        v.iter().map(|&a| Point::from_array(a)).collect()
    }

    #[test]
    fn normalize_examples() {
        let out = normalize(&pts(&[[0.0, 0.0, 0.0], [0.0, 0.0, 4.0]])).unwrap();
        assert_eq!(out, pts(&[[0.0, 0.0, -1.0], [0.0, 0.0, 1.0]]));
        let same = normalize(&pts(&[[1.5, -2.0, 3.0]; 4])).unwrap();
        assert!(same.iter().all(|p| p.norm() == 0.0));
        let unit = pts(&[[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, -0.5, 0.0]]);
        for (a, b) in normalize(&unit).unwrap().iter().zip(&unit) {
            assert!(a.distance(*b) < 1e-12);
        }
        assert!(normalize(&[]).is_err());
    }

    #[test]
    fn fps_collinear_trace() {
        let c = pts(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]);
        assert_eq!(fps_from_seed(&c, 3, 0), vec![0, 2, 1]);
        assert_eq!(fps_from_seed(&c, 1, 1), vec![1]);
        // ties: from the middle both ends are at distance 1
        assert_eq!(fps_from_seed(&c, 2, 1), vec![1, 0]);
    }

    #[test]
    fn fps_small_pool_fills_with_fewest_repeats() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = pts(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let out = fps(&c, 7, &mut rng).unwrap();
        assert_eq!(out.len(), 7);
        for p in &c {
            let count = out.iter().filter(|q| *q == p).count();
            assert!((2..=3).contains(&count));
        }
        assert_eq!(fps(&c, 1, &mut rng).unwrap().len(), 1);
    }

    #[test]
    fn synth_splits_and_sphere_norms() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let spec = SynthSpec { classes: vec![ShapeFamily::Sphere, ShapeFamily::Simplex], objects_per_class: 20, candidates: 64, noise: 0.0 };
        let recs = synth_dataset(&spec, &mut rng).unwrap();
        for label in 0..2 {
            let count = |s: Split| recs.iter().filter(|r| r.label == label && r.split == s).count();
            assert_eq!((count(Split::Train), count(Split::Val), count(Split::Test)), (14, 2, 4));
        }
        for r in recs.iter().filter(|r| r.label == 0) {
            assert!(r.candidates.iter().all(|p| (p.norm() - 1.0).abs() < 1e-12));
        }
        let one = SynthSpec::new(vec![ShapeFamily::Cube], 10);
        assert!(matches!(synth_dataset(&one, &mut rng), Err(TrainError::Config(m)) if m.contains("2 classes")));
    }

    #[test]
    fn families_have_unit_max_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for f in ShapeFamily::ALL {
            let r = (0..2000).map(|_| f.sample(&mut rng).norm()).fold(0.0, f64::max);
            assert!(r <= 1.0 + 1e-12 && r > 0.9, "{f}: {r}");
            assert_eq!(f.to_string().parse::<ShapeFamily>().unwrap(), f);
        }
    }

    #[test]
    fn split_counts_examples() {
        assert_eq!(split_counts(100), (70, 10, 20));
        assert_eq!(split_counts(10), (7, 1, 2));
        assert_eq!(split_counts(7), (4, 0, 3));
    }
}
