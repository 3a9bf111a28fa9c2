//! The invariant suite behind `hyqurp verify`: generator, encoding, circuit
//! and gradient checks for every N in a range, each reported by name.

use std::fmt;

use anyhow::Result;
use hyqurp_core::circuit::{init_singlets, CircuitConfig, CircuitParams, QuantumCircuit};
use hyqurp_core::encoder::{encode_unitary, phase_aligned_residual, zyz_angles, zyz_unitary, EncoderConfig, Point3};
use hyqurp_core::grad::{cross_entropy, relative_error, GRADIENT_CHECK_FLOOR};
use hyqurp_core::group::{joint_invariant_dim, pair_permutation_rep, shared_generators, Sign, TwirledGenerator};
use hyqurp_core::head::{head_forward, HeadConfig, HeadParams, Profile};
use hyqurp_core::model::{hybrid_features, Classifier, HybridModel};
use hyqurp_core::qcore::{Mat2, StateVector, WirePermutation};
use hyqurp_core::random::{random_permutation, random_rotation, random_state, random_su2, rotate};
use hyqurp_train::metrics::{cosine_and_ratio, transform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const UNITARITY_TOL: f64 = 1e-10;
pub const PAIR_EQUIVARIANCE_TOL: f64 = 1e-12;
pub const SU2_TOL: f64 = 1e-10;
pub const ENCODING_TOL: f64 = 1e-10;
pub const ZYZ_TOL: f64 = 1e-8;
pub const SINGLET_TOL: f64 = 1e-12;
pub const INVARIANCE_TOL: f64 = 1e-6;
pub const GRADIENT_TOL: f64 = 1e-5;
pub const FD_STEP: f64 = 1e-5;

/// Random pair permutations tried per generator above this N instead of
/// all of them.
pub const EXHAUSTIVE_PAIR_LIMIT: usize = 4;
pub const RANDOM_PAIR_PERMUTATIONS: usize = 20;

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub n_min: usize,
    pub n_max: usize,
    pub seed: u64,
    /// Negate every generator term that touches wire 1. Breaks pair
    /// symmetry while keeping each generator Hermitian.
    pub inject_fault: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { n_min: 2, n_max: 4, seed: 0, inject_fault: false }
    }
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub n: usize,
    /// Worst residual seen; for count-valued checks, the count.
    pub worst: f64,
    pub tol: f64,
    pub passed: bool,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag}  n={}  {:<26} worst={:.3e}  tol={:.0e}", self.n, self.name, self.worst, self.tol)
    }
}

fn outcome(name: &'static str, n: usize, worst: f64, tol: f64) -> CheckOutcome {
    // NaN fails
    CheckOutcome { name, n, worst, tol, passed: worst <= tol }
}

fn fold_max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

/// `u` on every wire.
pub fn global_rotation(psi: &StateVector<f64>, u: &Mat2<f64>) -> Result<StateVector<f64>> {
    let mut out = psi.clone();
    for w in 0..psi.n_qubits() {
        out.apply_single_qubit_in_place(w, u)?;
    }
    Ok(out)
}

/// Every generator of `P_k^±` on `n` pairs, optionally with the wire-1 fault.
pub fn generators(n: usize, inject_fault: bool) -> Result<Vec<TwirledGenerator<f64>>> {
    let mut out = Vec::new();
    for k in 2..=n {
        for sign in Sign::BOTH {
            let g = TwirledGenerator::<f64>::build(n, k, sign)?;
            if !inject_fault {
                out.push(g);
                continue;
            }
            let terms = g
                .terms()
                .iter()
                .cloned()
                .map(|mut t| {
                    if t.wires().contains(&1) {
                        t.coefficient = -t.coefficient;
                    }
                    t
                })
                .collect();
            out.push(TwirledGenerator::from_terms(n, k, sign, terms)?);
        }
    }
    Ok(out)
}

/// Pair permutations tested at `n`: all of them up to
/// [`EXHAUSTIVE_PAIR_LIMIT`], a random sample beyond.
pub fn pair_permutations<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<WirePermutation>> {
    let sigmas: Vec<Vec<usize>> = if n <= EXHAUSTIVE_PAIR_LIMIT {
        WirePermutation::all(n).into_iter().map(|p| p.image().to_vec()).collect()
    } else {
        (0..RANDOM_PAIR_PERMUTATIONS).map(|_| random_permutation(n, rng)).collect()
    };
    Ok(sigmas.iter().map(|s| pair_permutation_rep(n, s)).collect::<hyqurp_core::Result<_>>()?)
}

/// Points of norm at most 1, plus the axis and origin cases the Z-Y-Z
/// extraction treats separately.
pub fn zyz_test_points<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<Point3<f64>> {
    let mut pts = vec![
        Point3::new(0.0, 0.0, 0.0),
        Point3::new(0.0, 0.0, 0.7),
        Point3::new(0.0, 0.0, -0.7),
        Point3::new(0.9, 0.0, 0.0),
        Point3::new(0.0, -0.9, 0.0),
        Point3::new(1e-13, 0.0, 0.5),
        Point3::new(0.6, 0.8, 0.0),
        Point3::new(1e-9, 1e-9, -1.0),
    ];
    while pts.len() < count {
        pts.push(random_point(rng));
    }
    pts.truncate(count.max(8));
    pts
}

pub fn random_point<R: Rng + ?Sized>(rng: &mut R) -> Point3<f64> {
    loop {
        let p = Point3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if p.norm() <= 1.0 {
            return p;
        }
    }
}

pub fn random_points<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Point3<f64>> {
    (0..n).map(|_| random_point(rng)).collect()
}

/// `max ||E(Rp) - u E(p) u^dagger||_max` over random `(p, R)`.
pub fn encoding_equivariance<R: Rng + ?Sized>(draws: usize, rng: &mut R) -> Result<f64> {
    let cfg = EncoderConfig::<f64>::default();
    let mut worst = Vec::with_capacity(draws);
    for _ in 0..draws {
        let p = random_point(rng);
        let (rot, u) = random_rotation::<f64, _>(rng);
        let lhs = encode_unitary(rotate(&rot, p), &cfg)?;
        let rhs = u * encode_unitary(p, &cfg)? * u.adjoint();
        worst.push(lhs.max_abs_diff(&rhs));
    }
    Ok(fold_max(worst))
}

/// `max ||R_z R_y R_z - E(p)||` after phase alignment.
pub fn zyz_reconstruction(points: &[Point3<f64>]) -> Result<f64> {
    let cfg = EncoderConfig::<f64>::default();
    let mut worst = Vec::with_capacity(points.len());
    for &p in points {
        let (a, b, g) = zyz_angles(p, &cfg)?;
        worst.push(phase_aligned_residual(&encode_unitary(p, &cfg)?, &zyz_unitary(a, b, g)));
    }
    Ok(fold_max(worst))
}

/// `max ||C u^{2N} psi - u^{2N} C psi||` for random `(u, psi, params)`.
pub fn circuit_su2_residual<R: Rng + ?Sized>(circuit: &QuantumCircuit<f64>, draws: usize, rng: &mut R) -> Result<f64> {
    let cfg = *circuit.config();
    let nq = cfg.n_qubits();
    let mut worst = Vec::with_capacity(draws);
    for _ in 0..draws {
        let params = CircuitParams::from_vec(&cfg, (0..cfg.n_params()).map(|_| rng.random_range(-1.0..1.0)).collect())?;
        let u = random_su2::<f64, _>(rng);
        let psi = random_state::<f64, _>(nq, rng);
        let mut a = vec![global_rotation(&psi, &u)?];
        circuit.evolve_batch(&mut a, &params)?;
        let mut b = vec![psi];
        circuit.evolve_batch(&mut b, &params)?;
        worst.push(a[0].distance(&global_rotation(&b[0], &u)?)?);
    }
    Ok(fold_max(worst))
}

/// Worst `1 - cos` and `|1 - ratio|` of logits under random rotation and
/// permutation of random point sets.
pub fn logit_invariance<R: Rng + ?Sized>(model: &dyn Classifier<f64>, transforms: usize, rng: &mut R) -> Result<(f64, f64)> {
    let mut batch = Vec::with_capacity(2 * transforms);
    for _ in 0..transforms {
        let pts = random_points(model.n_points(), rng);
        let (rot, _) = random_rotation::<f64, _>(rng);
        let perm = random_permutation(pts.len(), rng);
        let moved = transform(&pts, &rot, &perm);
        batch.extend([pts, moved]);
    }
    let z = model.logits_batch(&batch)?;
    let (mut cos_dev, mut ratio_dev) = (Vec::new(), Vec::new());
    for pair in z.chunks(2) {
        let (c, r) = cosine_and_ratio(&pair[0], &pair[1]);
        cos_dev.push((1.0 - c).abs());
        ratio_dev.push((1.0 - r).abs());
    }
    Ok((fold_max(cos_dev), fold_max(ratio_dev)))
}

/// Worst relative error between adjoint gradients and central differences
/// on every quantum coefficient and every head parameter, for one labelled
/// random point set.
pub fn gradient_check<R: Rng + ?Sized>(model: &HybridModel<f64>, rng: &mut R) -> Result<f64> {
    let pts = random_points(model.n_points(), rng);
    let label = rng.random_range(0..model.classes());
    let batch = vec![pts];
    let (_, grad, _) = model.loss_and_grad(&batch, &[label])?;
    let nq = model.quantum().len();
    let loss = |m: &HybridModel<f64>| -> Result<f64> { Ok(cross_entropy(&m.logits_batch(&batch)?[0], label)?.0) };
    let mut errs = Vec::with_capacity(grad.len());
    let mut probe = model.clone();
    for (i, &g) in grad.iter().enumerate().take(nq) {
        let c = model.quantum().values()[i];
        probe.quantum_mut().values_mut()[i] = c + FD_STEP;
        let up = loss(&probe)?;
        probe.quantum_mut().values_mut()[i] = c - FD_STEP;
        let down = loss(&probe)?;
        probe.quantum_mut().values_mut()[i] = c;
        errs.push(relative_error(g, (up - down) / (2.0 * FD_STEP), GRADIENT_CHECK_FLOOR));
    }
    // head parameters through the head alone on the fixed features
    let feats = hybrid_features(model, &batch)?.remove(0);
    let head = model.head();
    let mut h = head.values().to_vec();
    let head_loss = |h: &[f64]| -> Result<f64> {
        let params = HeadParams::from_vec(head.config(), h.to_vec())?;
        Ok(cross_entropy(&head_forward(feats.rows(), &params)?.0, label)?.0)
    };
    for (i, &g) in grad[nq..].iter().enumerate() {
        let v = h[i];
        h[i] = v + FD_STEP;
        let up = head_loss(&h)?;
        h[i] = v - FD_STEP;
        let down = head_loss(&h)?;
        h[i] = v;
        errs.push(relative_error(g, (up - down) / (2.0 * FD_STEP), GRADIENT_CHECK_FLOOR));
    }
    Ok(fold_max(errs))
}

/// Hybrid model with coefficients spread over `(-1, 1)` instead of the
/// small training initialisation, so the checks see a scrambled circuit.
pub fn scrambled_model<R: Rng + ?Sized>(n: usize, blocks: usize, classes: usize, rng: &mut R) -> Result<HybridModel<f64>> {
    let cfg = CircuitConfig::new(n, blocks, hyqurp_core::encoder::DEFAULT_THETA)?;
    let mut model = HybridModel::new(cfg, &HeadConfig::profile(Profile::Light, classes)?, rng)?;
    for c in model.quantum_mut().values_mut() {
        *c = rng.random_range(-1.0..1.0);
    }
    Ok(model)
}

/// Runs every check for each N in the range, reporting each outcome as it
/// completes.
pub fn run(opts: &VerifyOptions, mut report: impl FnMut(&CheckOutcome)) -> Result<Vec<CheckOutcome>> {
    if opts.n_min < 2 || opts.n_min > opts.n_max {
        anyhow::bail!(crate::UsageError(format!("need 2 ≤ n-min ≤ n-max, got {}..{}", opts.n_min, opts.n_max)));
    }
    let mut all = Vec::new();
    let mut push = |o: CheckOutcome| {
        report(&o);
        all.push(o);
    };
    for n in opts.n_min..=opts.n_max {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ ((n as u64) << 32));
        let gens = generators(n, opts.inject_fault)?;
        push(outcome("generator-hermiticity", n, fold_max(gens.iter().map(|g| g.hermiticity_residual())), HERMITICITY_TOL));

        let sigmas = pair_permutations(n, &mut rng)?;
        let mut worst = Vec::new();
        for g in &gens {
            worst.extend(g.commutator_residuals(&sigmas)?);
        }
        push(outcome("pair-equivariance", n, fold_max(worst), PAIR_EQUIVARIANCE_TOL));

        let mut worst = Vec::new();
        for g in &gens {
            let u = random_su2::<f64, _>(&mut rng);
            let psi = random_state::<f64, _>(2 * n, &mut rng);
            let lhs = g.apply_terms(&global_rotation(&psi, &u)?)?;
            worst.push(lhs.distance(&global_rotation(&g.apply_terms(&psi)?, &u)?)?);
        }
        push(outcome("generator-su2", n, fold_max(worst), SU2_TOL));

        let cs: Vec<f64> = (0..2).map(|_| rng.random_range(-2.0..2.0)).collect();
        let mut worst = Vec::new();
        for g in &gens {
            for &c in &cs {
                worst.push(g.exp_unitarity_residual(c));
            }
        }
        push(outcome("gate-unitarity", n, fold_max(worst), UNITARITY_TOL));

        push(outcome("encoding-equivariance", n, encoding_equivariance(50, &mut rng)?, ENCODING_TOL));
        push(outcome("zyz-reconstruction", n, zyz_reconstruction(&zyz_test_points(100, &mut rng))?, ZYZ_TOL));

        let singlets = init_singlets::<f64>(n)?;
        let mut worst = Vec::new();
        for _ in 0..5 {
            let u = random_su2::<f64, _>(&mut rng);
            worst.push(global_rotation(&singlets, &u)?.distance(&singlets)?);
        }
        push(outcome("singlet-invariance", n, fold_max(worst), SINGLET_TOL));

        if n <= 4 {
            push(outcome("joint-invariant-triviality", n, joint_invariant_dim(n)? as f64, 0.0));
        }

        let circuit = QuantumCircuit::with_generators(CircuitConfig::new(n, 2, hyqurp_core::encoder::DEFAULT_THETA)?, shared_generators(n)?)?;
        push(outcome("circuit-su2", n, circuit_su2_residual(&circuit, 3, &mut rng)?, SU2_TOL));

        let model = scrambled_model(n, 2, 3, &mut rng)?;
        let (c, r) = logit_invariance(&model, 5, &mut rng)?;
        push(outcome("end-to-end-invariance", n, c.max(r), INVARIANCE_TOL));

        push(outcome("gradients", n, gradient_check(&model, &mut rng)?, GRADIENT_TOL));
    }
    Ok(all)
}
