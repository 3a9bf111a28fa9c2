//! The quantum forward pass: singlet pairs, point encoding, `B` blocks of
//! twirled-generator gates and pairwise Heisenberg readout.

use std::sync::Arc;

use num_complex::Complex;

use crate::encoder::{apply_encoding, encoding_layer, EncoderConfig, Point3};
use crate::error::{Error, Result};
use crate::group::{shared_generators, GeneratorSet, Sign};
use crate::qcore::{Pauli, StateVector};
use crate::scalar::Scalar;

pub const DEFAULT_BLOCKS: usize = 12;

/// Largest `|<H^±>|`: three Pauli terms, each a product of two factors of
/// operator norm at most 2.
pub const FEATURE_BOUND: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitConfig<T> {
    n_points: usize,
    blocks: usize,
    encoder: EncoderConfig<T>,
}

impl<T: Scalar> CircuitConfig<T> {
    pub fn new(n_points: usize, blocks: usize, theta: T) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::TooSmall { what: "point count", value: n_points, min: 2 });
        }
        if blocks < 1 {
            return Err(Error::TooSmall { what: "block count", value: blocks, min: 1 });
        }
        Ok(CircuitConfig { n_points, blocks, encoder: EncoderConfig::new(theta)? })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn encoder(&self) -> &EncoderConfig<T> {
        &self.encoder
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_points
    }

    pub fn n_params(&self) -> usize {
        2 * self.blocks * (self.n_points - 1)
    }

    pub fn n_features(&self) -> usize {
        self.n_points * (self.n_points - 1) / 2
    }
}

/// Coefficients `c_{l,k}^±`, flat with index `(l (N-1) + k - 2) 2 + sign`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitParams<T> {
    n_points: usize,
    blocks: usize,
    values: Vec<T>,
}

impl<T: Scalar> CircuitParams<T> {
    pub fn zeros(cfg: &CircuitConfig<T>) -> Self {
        CircuitParams { n_points: cfg.n_points, blocks: cfg.blocks, values: vec![T::zero(); cfg.n_params()] }
    }

    pub fn from_vec(cfg: &CircuitConfig<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != cfg.n_params() {
            return Err(Error::DimensionMismatch { expected: cfg.n_params(), got: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("circuit coefficient"));
        }
        Ok(CircuitParams { n_points: cfg.n_points, blocks: cfg.blocks, values })
    }

    pub fn index(&self, block: usize, k: usize, sign: Sign) -> usize {
        assert!(block < self.blocks && (2..=self.n_points).contains(&k), "coefficient index out of range");
        (block * (self.n_points - 1) + k - 2) * 2 + sign.index()
    }

    pub fn get(&self, block: usize, k: usize, sign: Sign) -> T {
        self.values[self.index(block, k, sign)]
    }

    pub fn set(&mut self, block: usize, k: usize, sign: Sign, v: T) {
        let i = self.index(block, k, sign);
        self.values[i] = v;
    }

    /// The `2 (N-1)` coefficients of one block in gate order.
    pub fn block(&self, l: usize) -> &[T] {
        let w = 2 * (self.n_points - 1);
        &self.values[l * w..(l + 1) * w]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }
}

/// Heisenberg features: one row per unordered pair `i < j` in lexicographic
/// order, columns `(H^+, H^-)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<T> {
    n_points: usize,
    rows: Vec<[T; 2]>,
}

impl<T: Scalar> FeatureMatrix<T> {
    pub fn zeros(n_points: usize) -> Self {
        FeatureMatrix { n_points, rows: vec![[T::zero(); 2]; n_points * n_points.saturating_sub(1) / 2] }
    }

    pub fn from_rows(n_points: usize, rows: Vec<[T; 2]>) -> Result<Self> {
        let expected = n_points * n_points.saturating_sub(1) / 2;
        if rows.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: rows.len() });
        }
        Ok(FeatureMatrix { n_points, rows })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn rows(&self) -> &[[T; 2]] {
        &self.rows
    }

    pub fn rows_mut(&mut self) -> &mut [[T; 2]] {
        &mut self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Row of the unordered pair `{i, j}`.
    pub fn row_index(&self, i: usize, j: usize) -> usize {
        let (i, j) = (i.min(j), i.max(j));
        assert!(i != j && j < self.n_points, "invalid point pair");
        i * (2 * self.n_points - i - 1) / 2 + (j - i - 1)
    }

    pub fn get(&self, i: usize, j: usize, sign: Sign) -> T {
        self.rows[self.row_index(i, j)][sign.index()]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.n_points;
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
    }

    pub fn max_abs(&self) -> T {
        self.rows.iter().flatten().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

/// `N` Bell singlets `(|01> - |10>)/sqrt 2` on wires `(2i, 2i+1)`.
pub fn init_singlets<T: Scalar>(n_pairs: usize) -> Result<StateVector<T>> {
    if n_pairs < 1 {
        return Err(Error::TooSmall { what: "pair count", value: n_pairs, min: 1 });
    }
    let mut amps = vec![Complex::new(T::one(), T::zero())];
    let h = T::FRAC_1_SQRT_2();
    for _ in 0..n_pairs {
        let mut next = vec![Complex::new(T::zero(), T::zero()); amps.len() * 4];
        for (x, a) in amps.iter().enumerate() {
            next[4 * x + 1] = *a * h;
            next[4 * x + 2] = *a * (-h);
        }
        amps = next;
    }
    StateVector::from_amplitudes(amps)
}

/// One block `G = prod_k exp(i c_k^+ P_k^+) exp(i c_k^- P_k^-)` applied to a
/// batch of states; `block_params` is in gate order.
pub fn apply_block_batch<T: Scalar>(states: &mut [StateVector<T>], block_params: &[T], gens: &GeneratorSet<T>) -> Result<()> {
    let n = gens.n_pairs();
    if block_params.len() != 2 * (n - 1) {
        return Err(Error::DimensionMismatch { expected: 2 * (n - 1), got: block_params.len() });
    }
    for k in 2..=n {
        for sign in Sign::BOTH {
            let c = block_params[(k - 2) * 2 + sign.index()];
            if c != T::zero() {
                gens.get(k, sign)?.apply_exp_batch(c, states)?;
            }
        }
    }
    Ok(())
}

pub fn apply_block<T: Scalar>(state: &StateVector<T>, block_params: &[T], gens: &GeneratorSet<T>) -> Result<StateVector<T>> {
    let mut out = state.clone();
    apply_block_batch(std::slice::from_mut(&mut out), block_params, gens)?;
    Ok(out)
}

/// Wires of the four two-qubit correlators making up pair `(i, j)`, with the
/// sign each contributes to `H^-` (all contribute `+1` to `H^+`).
fn heisenberg_terms(i: usize, j: usize) -> [(usize, usize, i8); 4] {
    [(2 * i, 2 * j, 1), (2 * i, 2 * j + 1, -1), (2 * i + 1, 2 * j, -1), (2 * i + 1, 2 * j + 1, 1)]
}

/// `<psi| H^±_{ij} |psi>` with
/// `H^± = sum_a (s_a^{2i} ± s_a^{2i+1})(s_a^{2j} ± s_a^{2j+1})`, evaluated from
/// Pauli-pair correlators.
pub fn measure_heisenberg<T: Scalar>(state: &StateVector<T>, i: usize, j: usize, sign: Sign) -> Result<T> {
    if i == j {
        return Err(Error::SamePair(i));
    }
    let n = state.n_qubits() / 2;
    if let Some(&bad) = [i, j].iter().find(|&&x| x >= n) {
        return Err(Error::PairOutOfRange { index: bad, n_pairs: n });
    }
    let mut acc = T::zero();
    for (a, b, s) in heisenberg_terms(i, j) {
        let w = if sign == Sign::Minus && s < 0 { -T::one() } else { T::one() };
        for p in Pauli::ALL {
            acc += w * state.pauli_pair_expectation(a, b, p);
        }
    }
    Ok(acc)
}

/// All features of a state, from one correlator per distinct wire pair.
pub fn heisenberg_features<T: Scalar>(state: &StateVector<T>) -> Result<FeatureMatrix<T>> {
    let n = state.n_qubits() / 2;
    let mut f = FeatureMatrix::zeros(n);
    for (r, (i, j)) in f.pairs().collect::<Vec<_>>().into_iter().enumerate() {
        let mut plus = T::zero();
        let mut minus = T::zero();
        for (a, b, s) in heisenberg_terms(i, j) {
            let corr = Pauli::ALL.iter().map(|&p| state.pauli_pair_expectation(a, b, p)).sum::<T>();
            plus += corr;
            minus += if s < 0 { -corr } else { corr };
        }
        f.rows[r] = [plus, minus];
    }
    Ok(f)
}

/// `sum_{i<j, ±} w_{ij}^± H^±_{ij} |psi>`.
pub fn apply_heisenberg_sum<T: Scalar>(state: &StateVector<T>, weights: &FeatureMatrix<T>) -> Result<StateVector<T>> {
    let n = state.n_qubits() / 2;
    if weights.n_points != n {
        return Err(Error::DimensionMismatch { expected: n, got: weights.n_points });
    }
    let mut out = vec![Complex::new(T::zero(), T::zero()); state.dim()];
    for (r, (i, j)) in weights.pairs().enumerate() {
        let [wp, wm] = weights.rows[r];
        for (a, b, s) in heisenberg_terms(i, j) {
            let w = if s < 0 { wp - wm } else { wp + wm };
            if w == T::zero() {
                continue;
            }
            for p in Pauli::ALL {
                state.accumulate_pauli_pair(a, b, p, w, &mut out);
            }
        }
    }
    StateVector::from_amplitudes(out)
}

/// Circuit for a fixed configuration, sharing a built generator set.
#[derive(Debug, Clone)]
pub struct QuantumCircuit<T> {
    cfg: CircuitConfig<T>,
    gens: Arc<GeneratorSet<T>>,
}

impl<T: Scalar> QuantumCircuit<T> {
    /// Uses the process-wide generator cache.
    pub fn new(cfg: CircuitConfig<T>) -> Result<Self> {
        let gens = shared_generators::<T>(cfg.n_points)?;
        Ok(QuantumCircuit { cfg, gens })
    }

    pub fn with_generators(cfg: CircuitConfig<T>, gens: Arc<GeneratorSet<T>>) -> Result<Self> {
        if gens.n_pairs() != cfg.n_points {
            return Err(Error::DimensionMismatch { expected: cfg.n_points, got: gens.n_pairs() });
        }
        Ok(QuantumCircuit { cfg, gens })
    }

    pub fn config(&self) -> &CircuitConfig<T> {
        &self.cfg
    }

    pub fn generators(&self) -> &GeneratorSet<T> {
        &self.gens
    }

    fn check_params(&self, params: &CircuitParams<T>) -> Result<()> {
        if params.n_points != self.cfg.n_points || params.blocks != self.cfg.blocks {
            return Err(Error::DimensionMismatch { expected: self.cfg.n_params(), got: params.len() });
        }
        Ok(())
    }

    /// Encoded singlet register, before any block.
    pub fn prepare(&self, points: &[Point3<T>]) -> Result<StateVector<T>> {
        if points.len() != self.cfg.n_points {
            return Err(Error::DimensionMismatch { expected: self.cfg.n_points, got: points.len() });
        }
        let mut psi = init_singlets(self.cfg.n_points)?;
        apply_encoding(&mut psi, &encoding_layer(points, &self.cfg.encoder)?)?;
        Ok(psi)
    }

    /// Applies all blocks `C = G^B ... G^1` to each state.
    pub fn evolve_batch(&self, states: &mut [StateVector<T>], params: &CircuitParams<T>) -> Result<()> {
        self.check_params(params)?;
        for l in 0..self.cfg.blocks {
            apply_block_batch(states, params.block(l), &self.gens)?;
        }
        Ok(())
    }

    /// Output states `C E psi_0` for a batch of point sets.
    pub fn output_states<P: AsRef<[Point3<T>]>>(&self, batch: &[P], params: &CircuitParams<T>) -> Result<Vec<StateVector<T>>> {
        let mut states = batch.iter().map(|p| self.prepare(p.as_ref())).collect::<Result<Vec<_>>>()?;
        self.evolve_batch(&mut states, params)?;
        Ok(states)
    }

    pub fn forward_batch<P: AsRef<[Point3<T>]>>(&self, batch: &[P], params: &CircuitParams<T>) -> Result<Vec<FeatureMatrix<T>>> {
        self.output_states(batch, params)?.iter().map(heisenberg_features).collect()
    }

    pub fn forward(&self, points: &[Point3<T>], params: &CircuitParams<T>) -> Result<FeatureMatrix<T>> {
        Ok(self.forward_batch(&[points], params)?.remove(0))
    }
}
