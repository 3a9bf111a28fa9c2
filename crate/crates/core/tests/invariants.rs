//! Cross-module invariants: generator symmetries, circuit equivariance and
//! representation-theoretic identities, each against an independent oracle.

use hyqurp_core::circuit::{apply_block, init_singlets, CircuitConfig, CircuitParams, QuantumCircuit};
use hyqurp_core::encoder::Point3;
use hyqurp_core::group::{joint_invariant_dim, pair_permutation_rep, so3_to_su2, su2_to_so3, Sign, TwirledGenerator};
use hyqurp_core::qcore::{expm, DenseOperator, Mat2, StateVector, WirePermutation};
use hyqurp_core::random::{random_permutation, random_rotation, random_state, random_su2, rotate};
use num_complex::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn global_rotation(psi: &StateVector<f64>, u: &Mat2<f64>) -> StateVector<f64> {
    let mut out = psi.clone();
    for w in 0..psi.n_qubits() {
        out.apply_single_qubit_in_place(w, u).unwrap();
    }
    out
}

/// Dense P_k^± summed term by term from explicit cycle permutation matrices.
fn brute_force_generator(n_pairs: usize, k: usize, sign: Sign) -> DenseOperator<f64> {
    fn tuples(n: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        for j in 0..n {
            if !prefix.contains(&j) {
                prefix.push(j);
                tuples(n, k, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut all = Vec::new();
    tuples(n_pairs, k, &mut Vec::new(), &mut all);
    let fact: f64 = (1..=k).map(|x| x as f64).product();
    let mut p = DenseOperator::<f64>::zeros(1 << (2 * n_pairs)).unwrap();
    for pairs in &all {
        for s in 0..1usize << k {
            let bits: Vec<usize> = (0..k).map(|m| (s >> m) & 1).collect();
            let weight = match sign {
                Sign::Plus => 1.0,
                Sign::Minus => if bits.iter().sum::<usize>() % 2 == 1 { -1.0 } else { 1.0 },
            };
            let wires: Vec<usize> = pairs.iter().zip(&bits).map(|(j, b)| 2 * j + b).collect();
            let tau = DenseOperator::from_wire_permutation(&WirePermutation::cycle(2 * n_pairs, &wires).unwrap());
            p = p.add(&tau.scale(Complex::new(weight / fact, 0.0))).unwrap();
        }
    }
    p
}

#[test]
fn n2_generators_match_brute_force_and_expm() {
    let mut r = rng(1);
    for sign in Sign::BOTH {
        let g = TwirledGenerator::<f64>::build(2, 2, sign).unwrap();
        let oracle = brute_force_generator(2, 2, sign);
        assert!(g.dense_from_terms().max_abs_diff(&oracle).unwrap() < 1e-15);
        for _ in 0..5 {
            let c = r.random_range(-3.0..3.0);
            let u = expm(&oracle.scale(Complex::new(0.0, c)));
            let psi = random_state::<f64, _>(4, &mut r);
            let got = g.apply_exp(c, &psi).unwrap();
            assert!(got.distance(&u.apply(&psi).unwrap()).unwrap() < 1e-12);
        }
    }
}

#[test]
fn n3_matches_brute_force() {
    for k in 2..=3 {
        for sign in Sign::BOTH {
            let g = TwirledGenerator::<f64>::build(3, k, sign).unwrap();
            assert!(g.dense_from_terms().max_abs_diff(&brute_force_generator(3, k, sign)).unwrap() < 1e-14);
        }
    }
}

#[test]
fn odd_minus_generators_vanish() {
    let zero = DenseOperator::<f64>::zeros(64).unwrap();
    assert!(brute_force_generator(3, 3, Sign::Minus).max_abs_diff(&zero).unwrap() < 1e-15);
    for n in 3..=5 {
        for k in (3..=n).step_by(2) {
            let g = TwirledGenerator::<f64>::build(n, k, Sign::Minus).unwrap();
            assert!(g.eigvals().iter().all(|v| v.abs() < 1e-12), "n={n} k={k}");
        }
        let even = TwirledGenerator::<f64>::build(n, 2, Sign::Minus).unwrap();
        assert!(even.eigvals().iter().any(|v| v.abs() > 1.0));
    }
}

#[test]
fn all_zero_state_examples() {
    for n in 2..=4usize {
        for k in 2..=n {
            let zero = StateVector::<f64>::zero(2 * n);
            let minus = TwirledGenerator::<f64>::build(n, k, Sign::Minus).unwrap().apply(&zero).unwrap();
            assert!(minus.norm() < 1e-12);
            // ordered k-tuples of pairs times 2^k selections, over k!
            let tuples: f64 = (n - k + 1..=n).map(|x| x as f64).product();
            let fact: f64 = (1..=k).map(|x| x as f64).product();
            let expect = tuples * 2f64.powi(k as i32) / fact;
            let plus = TwirledGenerator::<f64>::build(n, k, Sign::Plus).unwrap().apply_terms(&zero).unwrap();
            assert!((plus.amplitudes()[0].re - expect).abs() < 1e-12);
            assert!((plus.norm() - expect).abs() < 1e-12);
        }
    }
}

#[test]
fn generators_are_hermitian_and_spectrally_consistent() {
    for n in 2..=5usize {
        for k in 2..=n {
            for sign in Sign::BOTH {
                let g = TwirledGenerator::<f64>::build(n, k, sign).unwrap();
                assert!(g.hermiticity_residual() <= 1e-12);
                assert!(g.reconstruction_residual() <= 1e-10, "N={n} k={k} {sign}");
                assert!(g.eigvec_orthogonality_residual() <= 1e-10);
                assert!(g.exp_unitarity_residual(0.731) <= 1e-10);
            }
        }
    }
}

#[test]
fn pair_permutation_equivariance_exhaustive() {
    for n in 2..=4usize {
        let perms = WirePermutation::all(n);
        for k in 2..=n {
            for sign in Sign::BOTH {
                let g = TwirledGenerator::<f64>::build(n, k, sign).unwrap();
                for p in &perms {
                    let sigma = pair_permutation_rep(n, p.image()).unwrap();
                    assert!(g.commutator_residual(&sigma).unwrap() <= 1e-10);
                }
            }
        }
    }
}

#[test]
fn single_wire_swap_breaks_commutation() {
    // swapping two qubits of different pairs is not a pair permutation
    let g = TwirledGenerator::<f64>::build(3, 2, Sign::Minus).unwrap();
    let sigma = WirePermutation::transposition(6, 1, 2).unwrap();
    assert!(g.commutator_residual(&sigma).unwrap() > 1e-3);
}

#[test]
fn twirl_is_idempotent() {
    let n = 3;
    for sign in Sign::BOTH {
        let g = TwirledGenerator::<f64>::build(n, 2, sign).unwrap();
        let p = g.dense_from_terms();
        let perms = WirePermutation::all(n);
        let mut avg = DenseOperator::<f64>::zeros(p.dim()).unwrap();
        for s in &perms {
            let pi = DenseOperator::from_wire_permutation(&pair_permutation_rep(n, s.image()).unwrap());
            let conj = pi.matmul(&p).unwrap().matmul(&pi.adjoint()).unwrap();
            avg = avg.add(&conj.scale(Complex::new(1.0 / perms.len() as f64, 0.0))).unwrap();
        }
        assert!(avg.max_abs_diff(&p).unwrap() < 1e-12);
    }
}

#[test]
fn generators_commute_with_global_su2() {
    let mut r = rng(3);
    for n in 2..=4usize {
        for k in 2..=n {
            for sign in Sign::BOTH {
                let g = TwirledGenerator::<f64>::build(n, k, sign).unwrap();
                let u = random_su2::<f64, _>(&mut r);
                let psi = random_state::<f64, _>(2 * n, &mut r);
                let lhs = g.apply_terms(&global_rotation(&psi, &u)).unwrap();
                let rhs = global_rotation(&g.apply_terms(&psi).unwrap(), &u);
                assert!(lhs.distance(&rhs).unwrap() < 1e-10);
            }
        }
    }
}

#[test]
fn circuit_commutes_with_global_su2() {
    let mut r = rng(4);
    for n in 2..=4usize {
        let cfg = CircuitConfig::new(n, 2, 1.7).unwrap();
        let circ = QuantumCircuit::new(cfg).unwrap();
        for _ in 0..3 {
            let c: Vec<f64> = (0..cfg.n_params()).map(|_| r.random_range(-1.0..1.0)).collect();
            let params = CircuitParams::from_vec(&cfg, c).unwrap();
            let u = random_su2::<f64, _>(&mut r);
            let psi = random_state::<f64, _>(2 * n, &mut r);
            let mut a = vec![global_rotation(&psi, &u)];
            circ.evolve_batch(&mut a, &params).unwrap();
            let mut b = vec![psi];
            circ.evolve_batch(&mut b, &params).unwrap();
            assert!(a[0].distance(&global_rotation(&b[0], &u)).unwrap() < 1e-9);
        }
    }
}

#[test]
fn block_matches_dense_exponentials() {
    let mut r = rng(5);
    let cfg = CircuitConfig::new(2, 1, 1.7).unwrap();
    let circ = QuantumCircuit::new(cfg).unwrap();
    let c = [r.random_range(-2.0..2.0), r.random_range(-2.0..2.0)];
    let psi = random_state::<f64, _>(4, &mut r);
    let got = apply_block(&psi, &c, circ.generators()).unwrap();
    let plus = expm(&brute_force_generator(2, 2, Sign::Plus).scale(Complex::new(0.0, c[0])));
    let minus = expm(&brute_force_generator(2, 2, Sign::Minus).scale(Complex::new(0.0, c[1])));
    // + factor first, then -
    let want = minus.apply(&plus.apply(&psi).unwrap()).unwrap();
    assert!(got.distance(&want).unwrap() < 1e-12);
}

fn random_points(n: usize, r: &mut ChaCha8Rng) -> Vec<Point3<f64>> {
    (0..n).map(|_| Point3::new(r.random_range(-0.6..0.6), r.random_range(-0.6..0.6), r.random_range(-0.6..0.6))).collect()
}

#[test]
fn features_are_rotation_invariant_and_permutation_equivariant() {
    let mut r = rng(6);
    for n in [3usize, 4] {
        let cfg = CircuitConfig::new(n, 2, 1.7).unwrap();
        let circ = QuantumCircuit::new(cfg).unwrap();
        let c: Vec<f64> = (0..cfg.n_params()).map(|_| r.random_range(-1.0..1.0)).collect();
        let params = CircuitParams::from_vec(&cfg, c).unwrap();
        for _ in 0..5 {
            let pts = random_points(n, &mut r);
            let base = circ.forward(&pts, &params).unwrap();
            let (rot, _) = random_rotation::<f64, _>(&mut r);
            let rotated: Vec<_> = pts.iter().map(|&p| rotate(&rot, p)).collect();
            let f = circ.forward(&rotated, &params).unwrap();
            for (a, b) in base.rows().iter().zip(f.rows()) {
                assert!((a[0] - b[0]).abs() < 1e-9 && (a[1] - b[1]).abs() < 1e-9);
            }
            // point i moves to slot perm[i]
            let perm = random_permutation(n, &mut r);
            let mut permuted = pts.clone();
            for (i, &j) in perm.iter().enumerate() {
                permuted[j] = pts[i];
            }
            let f = circ.forward(&permuted, &params).unwrap();
            for (i, j) in base.pairs() {
                for sign in Sign::BOTH {
                    assert!((base.get(i, j, sign) - f.get(perm[i], perm[j], sign)).abs() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn zero_circuit_gives_zero_features() {
    let mut r = rng(7);
    let cfg = CircuitConfig::new(4, 3, 1.7).unwrap();
    let circ = QuantumCircuit::new(cfg).unwrap();
    let batch: Vec<_> = (0..10).map(|_| random_points(4, &mut r)).collect();
    for f in circ.forward_batch(&batch, &CircuitParams::zeros(&cfg)).unwrap() {
        assert!(f.max_abs() < 1e-10);
    }
}

#[test]
fn encoded_singlets_have_maximally_mixed_marginals() {
    let cfg = CircuitConfig::new(2, 1, 1.7).unwrap();
    let circ = QuantumCircuit::new(cfg).unwrap();
    let psi = circ.prepare(&[Point3::new(0.3, -0.2, 0.5), Point3::new(-0.4, 0.1, 0.2)]).unwrap();
    // every single-qubit Pauli expectation vanishes
    for w in 0..4 {
        for p in Mat2::<f64>::paulis() {
            let e = hyqurp_core::qcore::expectation(&psi, &DenseOperator::embed_single(4, w, &p)).unwrap();
            assert!(e.abs() < 1e-12);
        }
    }
    assert!(init_singlets::<f64>(2).unwrap().distance(&circ.prepare(&[Point3::default(); 2]).unwrap()).unwrap() < 1e-15);
}

#[test]
fn joint_invariants_are_trivial() {
    for n in 1..=4 {
        assert_eq!(joint_invariant_dim(n).unwrap(), 0);
    }
}

#[test]
fn f32_instantiation_runs() {
    let cfg = CircuitConfig::<f32>::new(3, 1, 1.7).unwrap();
    let circ = QuantumCircuit::new(cfg).unwrap();
    let params = CircuitParams::from_vec(&cfg, vec![0.3f32, -0.2, 0.5, 0.1]).unwrap();
    let pts = [Point3::new(0.1f32, 0.2, 0.3), Point3::new(-0.3, 0.1, 0.0), Point3::new(0.0, -0.4, 0.2)];
    let f = circ.forward(&pts, &params).unwrap();
    let f64_circ = QuantumCircuit::new(CircuitConfig::<f64>::new(3, 1, 1.7).unwrap()).unwrap();
    let p64 = CircuitParams::from_vec(f64_circ.config(), params.values().iter().map(|&v| v as f64).collect()).unwrap();
    let g = f64_circ.forward(&pts.map(|p| p.cast()), &p64).unwrap();
    for (a, b) in f.rows().iter().zip(g.rows()) {
        assert!((a[0] as f64 - b[0]).abs() < 1e-4 && (a[1] as f64 - b[1]).abs() < 1e-4);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wire_permutations_compose(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = 4;
        let a = WirePermutation::new(random_permutation(n, &mut r)).unwrap();
        let b = WirePermutation::new(random_permutation(n, &mut r)).unwrap();
        let psi = random_state::<f64, _>(n, &mut r);
        let seq = psi.apply_wire_permutation(&b).unwrap().apply_wire_permutation(&a).unwrap();
        let once = psi.apply_wire_permutation(&a.compose(&b).unwrap()).unwrap();
        prop_assert!(seq.distance(&once).unwrap() < 1e-12);
    }

    #[test]
    fn unitaries_preserve_norm(seed in any::<u64>(), wire in 0usize..5) {
        let mut r = rng(seed);
        let mut psi = random_state::<f64, _>(5, &mut r);
        for _ in 0..10 {
            psi.apply_single_qubit_in_place(wire, &random_su2(&mut r)).unwrap();
        }
        prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expectation_is_linear(seed in any::<u64>()) {
        let mut r = rng(seed);
        let psi = random_state::<f64, _>(2, &mut r);
        let a = DenseOperator::embed_single(2, 0, &Mat2::pauli_x());
        let b = DenseOperator::embed_single(2, 1, &Mat2::pauli_z()).scale(Complex::new(r.random_range(-2.0..2.0), 0.0));
        let sum = hyqurp_core::qcore::expectation(&psi, &a.add(&b).unwrap()).unwrap();
        let parts = hyqurp_core::qcore::expectation(&psi, &a).unwrap() + hyqurp_core::qcore::expectation(&psi, &b).unwrap();
        prop_assert!((sum - parts).abs() < 1e-10);
    }

    #[test]
    fn covering_map_is_a_homomorphism(seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = random_su2::<f64, _>(&mut r);
        let v = random_su2::<f64, _>(&mut r);
        let (ru, rv, ruv) = (su2_to_so3(&u).unwrap(), su2_to_so3(&v).unwrap(), su2_to_so3(&(u * v)).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                let prod: f64 = (0..3).map(|m| ru[i][m] * rv[m][j]).sum();
                prop_assert!((prod - ruv[i][j]).abs() < 1e-10);
                let gram: f64 = (0..3).map(|m| ru[m][i] * ru[m][j]).sum();
                let delta = if i == j { 1.0 } else { 0.0 };
                prop_assert!((gram - delta).abs() < 1e-10);
            }
        }
        // the lift returns u up to sign
        let back = so3_to_su2(&ru);
        let d = back.max_abs_diff(&u).min(back.max_abs_diff(&u.scale(Complex::new(-1.0, 0.0))));
        prop_assert!(d < 1e-10);
    }
}
