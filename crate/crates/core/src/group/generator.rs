use std::collections::HashMap;

use num_complex::Complex;

use super::Sign;
use crate::error::{Error, Result};
use crate::qcore::{DenseOperator, EigenDecomposition, StateVector, WirePermutation};
use crate::scalar::{cis, Scalar};

/// Largest pair count for which generators are realised densely
/// (`2^12 = 4096` amplitudes).
pub const DEFAULT_MAX_PAIRS: usize = 6;

/// One generalized k-cycle `tau_pi^s` with its sign weight.
///
/// The ordered pairs `(j_1, .., j_k)` and selection bits `(s_1, .., s_k)`
/// pick the wires `w_m = 2 j_m + s_m`; the term acts as the cycle
/// `w_1 -> w_2 -> .. -> w_k -> w_1` and fixes every other wire.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairCycleTerm {
    pub pairs: Vec<usize>,
    pub selection: Vec<bool>,
    /// `+1`, or `(-1)^{|s|}` for the odd-pattern generator.
    pub coefficient: i8,
}

impl PairCycleTerm {
    pub fn wires(&self) -> Vec<usize> {
        self.pairs.iter().zip(&self.selection).map(|(&j, &s)| 2 * j + s as usize).collect()
    }

    pub fn hamming_weight(&self) -> usize {
        self.selection.iter().filter(|&&s| s).count()
    }

    pub fn to_wire_permutation(&self, n_pairs: usize) -> Result<WirePermutation> {
        WirePermutation::cycle(2 * n_pairs, &self.wires())
    }
}

/// Ordered k-tuples of distinct elements of `0..n`, lexicographic.
fn ordered_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                rec(n, k, cur, used, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(n, k, &mut Vec::with_capacity(k), &mut vec![false; n], &mut out);
    out
}

/// The full term list of `P_k^±`: every ordered k-tuple of distinct pairs
/// times every selection vector.
pub fn pair_cycle_terms(n_pairs: usize, k: usize, sign: Sign) -> Result<Vec<PairCycleTerm>> {
    if k < 2 || k > n_pairs {
        return Err(Error::CycleLength { k, n_pairs });
    }
    let mut terms = Vec::with_capacity(ordered_tuples(n_pairs, k).len() << k);
    for pairs in ordered_tuples(n_pairs, k) {
        for bits in 0u32..(1 << k) {
            let selection: Vec<bool> = (0..k).map(|m| bits >> m & 1 == 1).collect();
            let odd = bits.count_ones() % 2 == 1;
            let coefficient = if sign == Sign::Minus && odd { -1 } else { 1 };
            terms.push(PairCycleTerm { pairs: pairs.clone(), selection, coefficient });
        }
    }
    Ok(terms)
}

/// Computational basis split into Hamming-weight sectors. Wire permutations
/// never change the Hamming weight, so every generator is block diagonal in
/// this basis.
#[derive(Debug, Clone)]
pub(crate) struct SectorLayout {
    pub sectors: Vec<Vec<usize>>,
    /// `(sector, position)` of every basis index.
    pub position: Vec<(usize, usize)>,
}

impl SectorLayout {
    pub fn new(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let mut sectors = vec![Vec::new(); n_qubits + 1];
        let mut position = vec![(0, 0); dim];
        for x in 0..dim {
            let w = x.count_ones() as usize;
            position[x] = (w, sectors[w].len());
            sectors[w].push(x);
        }
        SectorLayout { sectors, position }
    }
}

/// A cycle with its accumulated real weight, in bitmask form.
struct WeightedCycle {
    /// bit masks of the cycle wires in cycle order
    masks: Vec<usize>,
    weight: f64,
}

impl WeightedCycle {
    #[inline]
    fn permute(&self, x: usize) -> usize {
        let k = self.masks.len();
        let mut y = x;
        for m in &self.masks {
            y &= !m;
        }
        for i in 0..k {
            if x & self.masks[i] != 0 {
                y |= self.masks[(i + 1) % k];
            }
        }
        y
    }
}

/// Merges terms that realise the same wire permutation (a k-cycle is listed
/// once per rotation of its tuple) and applies the `1/k!` normalisation.
fn merge_terms(n_qubits: usize, k: usize, terms: &[PairCycleTerm]) -> Vec<WeightedCycle> {
    let norm = 1.0 / (1..=k).map(|i| i as f64).product::<f64>();
    let mut merged: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut order = Vec::new();
    for term in terms {
        let mut wires = term.wires();
        let start = (0..wires.len()).min_by_key(|&i| wires[i]).unwrap_or(0);
        wires.rotate_left(start);
        let entry = merged.entry(wires.clone()).or_insert_with(|| {
            order.push(wires);
            0.0
        });
        *entry += term.coefficient as f64 * norm;
    }
    order
        .into_iter()
        .map(|wires| WeightedCycle {
            weight: merged[&wires],
            masks: wires.iter().map(|&w| 1usize << (n_qubits - 1 - w)).collect(),
        })
        .filter(|c| c.weight != 0.0)
        .collect()
}

#[derive(Debug, Clone)]
struct SectorSpectrum<T> {
    indices: Vec<usize>,
    eigvals: Vec<T>,
    /// row-major `d x d`, eigenvector `j` in column `j`
    eigvecs: Vec<T>,
}

/// The Hermitian generator `P_k^±` on `N` singlet pairs (`2N` wires).
///
/// Stores the term list together with the spectral decomposition of each
/// Hamming-weight block of its dense realisation; `exp(i c P)` is applied
/// through the cached eigenvectors.
#[derive(Debug, Clone)]
pub struct TwirledGenerator<T> {
    n_pairs: usize,
    k: usize,
    sign: Sign,
    terms: Vec<PairCycleTerm>,
    sectors: Vec<SectorSpectrum<T>>,
}

impl<T: Scalar> TwirledGenerator<T> {
    pub fn build(n_pairs: usize, k: usize, sign: Sign) -> Result<Self> {
        Self::build_with_limit(n_pairs, k, sign, DEFAULT_MAX_PAIRS)
    }

    pub fn build_with_limit(n_pairs: usize, k: usize, sign: Sign, max_pairs: usize) -> Result<Self> {
        if n_pairs > max_pairs {
            return Err(Error::TooLarge { what: "pair count", value: n_pairs, limit: max_pairs });
        }
        let terms = pair_cycle_terms(n_pairs, k, sign)?;
        Self::from_terms(n_pairs, k, sign, terms)
    }

    /// Builds a generator from an explicit term list. The list is taken as
    /// given, so this also serves to construct deliberately perturbed
    /// operators for fault-injection checks.
    pub fn from_terms(n_pairs: usize, k: usize, sign: Sign, terms: Vec<PairCycleTerm>) -> Result<Self> {
        if k < 2 || k > n_pairs {
            return Err(Error::CycleLength { k, n_pairs });
        }
        for t in &terms {
            if let Some(&j) = t.pairs.iter().find(|&&j| j >= n_pairs) {
                return Err(Error::PairOutOfRange { index: j, n_pairs });
            }
            if t.pairs.len() != t.selection.len() {
                return Err(Error::Shape("term selection length differs from its pair tuple".into()));
            }
        }
        let mut gen = TwirledGenerator { n_pairs, k, sign, terms, sectors: Vec::new() };
        let layout = SectorLayout::new(gen.n_qubits());
        let blocks = gen.realization_blocks(&layout);
        let mut sectors = Vec::with_capacity(blocks.len());
        for (indices, block) in layout.sectors.iter().zip(blocks) {
            let d = indices.len();
            let sym: Vec<T> = (0..d * d)
                .map(|idx| {
                    let (r, c) = (idx / d, idx % d);
                    T::of(0.5 * (block[r * d + c] + block[c * d + r]))
                })
                .collect();
            let (eigvals, eigvecs) = T::symmetric_eigen(d, &sym).ok_or(Error::NoConvergence)?;
            sectors.push(SectorSpectrum { indices: indices.clone(), eigvals, eigvecs });
        }
        gen.sectors = sectors;
        Ok(gen)
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_pairs
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn terms(&self) -> &[PairCycleTerm] {
        &self.terms
    }

    /// Dense realisation recomputed from the term list, one row-major `f64`
    /// block per Hamming-weight sector.
    fn realization_blocks(&self, layout: &SectorLayout) -> Vec<Vec<f64>> {
        let mut blocks: Vec<Vec<f64>> = layout.sectors.iter().map(|s| vec![0.0; s.len() * s.len()]).collect();
        for cycle in merge_terms(self.n_qubits(), self.k, &self.terms) {
            for x in 0..self.dim() {
                let y = cycle.permute(x);
                let (w, col) = layout.position[x];
                let (wy, row) = layout.position[y];
                debug_assert_eq!(w, wy);
                let d = layout.sectors[w].len();
                blocks[w][row * d + col] += cycle.weight;
            }
        }
        blocks
    }

    /// All eigenvalues, ascending.
    pub fn eigvals(&self) -> Vec<T> {
        let mut all: Vec<T> = self.sectors.iter().flat_map(|s| s.eigvals.iter().copied()).collect();
        all.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalue"));
        all
    }

    /// `||P - P^T||_max` of the realisation built from the term list.
    pub fn hermiticity_residual(&self) -> T {
        let layout = SectorLayout::new(self.n_qubits());
        let mut worst = 0.0f64;
        for (s, block) in layout.sectors.iter().zip(self.realization_blocks(&layout)) {
            let d = s.len();
            for r in 0..d {
                for c in r + 1..d {
                    worst = worst.max((block[r * d + c] - block[c * d + r]).abs());
                }
            }
        }
        T::of(worst)
    }

    /// `||U^dagger U - I||_max` for `U = exp(i c P)` assembled densely, sector
    /// by sector, from the cached spectrum.
    pub fn exp_unitarity_residual(&self, c: T) -> T {
        self.exp_unitarity_residuals(&[c])[0]
    }

    /// [`Self::exp_unitarity_residual`] for several `c`, sharing `V^T V`.
    ///
    /// Evaluates `U^dagger U = V (E^* (V^T V) E) V^T` with `E = exp(i c L)`.
    pub fn exp_unitarity_residuals(&self, cs: &[T]) -> Vec<T> {
        let mut worst = vec![T::zero(); cs.len()];
        for spec in &self.sectors {
            let d = spec.indices.len();
            let di = d as isize;
            let v = &spec.eigvecs;
            let mut gram = vec![T::zero(); d * d];
            T::gemm(d, d, d, T::one(), v, (1, di), v, (di, 1), T::zero(), &mut gram, (di, 1));
            for (&c, worst) in cs.iter().zip(worst.iter_mut()) {
                let (cos, sin): (Vec<T>, Vec<T>) = spec.eigvals.iter().map(|&l| ((c * l).cos(), (c * l).sin())).unzip();
                // [Re M | Im M] with M_ij = W_ij exp(i c (l_j - l_i))
                let mut m = vec![T::zero(); 2 * d * d];
                for i in 0..d {
                    for j in 0..d {
                        let w = gram[i * d + j];
                        m[i * 2 * d + j] = w * (cos[i] * cos[j] + sin[i] * sin[j]);
                        m[i * 2 * d + d + j] = w * (cos[i] * sin[j] - sin[i] * cos[j]);
                    }
                }
                let mut vm = vec![T::zero(); 2 * d * d];
                T::gemm(d, d, 2 * d, T::one(), v, (di, 1), &m, (2 * di, 1), T::zero(), &mut vm, (2 * di, 1));
                let mut re = vec![T::zero(); d * d];
                let mut im = vec![T::zero(); d * d];
                T::gemm(d, d, d, T::one(), &vm, (2 * di, 1), v, (1, di), T::zero(), &mut re, (di, 1));
                T::gemm(d, d, d, T::one(), &vm[d..], (2 * di, 1), v, (1, di), T::zero(), &mut im, (di, 1));
                for r in 0..d {
                    for col in 0..d {
                        let target = if r == col { T::one() } else { T::zero() };
                        let x = re[r * d + col] - target;
                        let y = im[r * d + col];
                        *worst = worst.max((x * x + y * y).sqrt());
                    }
                }
            }
        }
        worst
    }

    /// `||V diag(lambda) V^T - P||_max / max(1, ||P||_max)` across sectors.
    pub fn reconstruction_residual(&self) -> T {
        let layout = SectorLayout::new(self.n_qubits());
        let mut worst = T::zero();
        let mut scale = T::one();
        for (spec, block) in self.sectors.iter().zip(self.realization_blocks(&layout)) {
            let d = spec.indices.len();
            let scaled: Vec<T> = (0..d * d).map(|idx| spec.eigvecs[idx] * spec.eigvals[idx % d]).collect();
            let mut rec = vec![T::zero(); d * d];
            let di = d as isize;
            T::gemm(d, d, d, T::one(), &scaled, (di, 1), &spec.eigvecs, (1, di), T::zero(), &mut rec, (di, 1));
            for (r, p) in rec.iter().zip(&block) {
                let p = T::of(*p);
                scale = scale.max(p.abs());
                worst = worst.max((*r - p).abs());
            }
        }
        worst / scale
    }

    /// `||V^T V - I||_max` across sectors.
    pub fn eigvec_orthogonality_residual(&self) -> T {
        let mut worst = T::zero();
        for spec in &self.sectors {
            let d = spec.indices.len();
            let di = d as isize;
            let mut gram = vec![T::zero(); d * d];
            T::gemm(d, d, d, T::one(), &spec.eigvecs, (1, di), &spec.eigvecs, (di, 1), T::zero(), &mut gram, (di, 1));
            for (idx, g) in gram.iter().enumerate() {
                let target = if idx / d == idx % d { T::one() } else { T::zero() };
                worst = worst.max((*g - target).abs());
            }
        }
        worst
    }

    /// `||Pi(sigma) P - P Pi(sigma)||_max` on the term-list realisation.
    pub fn commutator_residual(&self, sigma: &WirePermutation) -> Result<T> {
        Ok(self.commutator_residuals(std::slice::from_ref(sigma))?.remove(0))
    }

    /// [`Self::commutator_residual`] for many permutations, building the
    /// realisation once.
    pub fn commutator_residuals(&self, sigmas: &[WirePermutation]) -> Result<Vec<T>> {
        if let Some(bad) = sigmas.iter().find(|s| s.len() != self.n_qubits()) {
            return Err(Error::DimensionMismatch { expected: self.n_qubits(), got: bad.len() });
        }
        let layout = SectorLayout::new(self.n_qubits());
        let blocks = self.realization_blocks(&layout);
        let entry = |y: usize, x: usize| -> f64 {
            let (w, col) = layout.position[x];
            let (wy, row) = layout.position[y];
            if w != wy {
                return 0.0;
            }
            blocks[w][row * layout.sectors[w].len() + col]
        };
        let mut out = Vec::with_capacity(sigmas.len());
        for sigma in sigmas {
            let fwd: Vec<usize> = (0..self.dim()).map(|x| sigma.permute_index(x)).collect();
            let inv = sigma.inverse();
            let back: Vec<usize> = (0..self.dim()).map(|y| inv.permute_index(y)).collect();
            let mut worst = 0.0f64;
            for sector in &layout.sectors {
                for &y in sector {
                    for &x in sector {
                        // (Pi P)[y][x] = P[pi^-1 y][x], (P Pi)[y][x] = P[y][pi x]
                        worst = worst.max((entry(back[y], x) - entry(y, fwd[x])).abs());
                    }
                }
            }
            out.push(T::of(worst));
        }
        Ok(out)
    }

    /// Dense realisation straight from the term list. Materialises a
    /// `4^N`-entry matrix.
    pub fn dense_from_terms(&self) -> DenseOperator<T> {
        let layout = SectorLayout::new(self.n_qubits());
        let blocks = self.realization_blocks(&layout);
        let mut m = DenseOperator::zeros(self.dim()).expect("power of two");
        for (indices, block) in layout.sectors.iter().zip(blocks) {
            let d = indices.len();
            for (r, &y) in indices.iter().enumerate() {
                for (c, &x) in indices.iter().enumerate() {
                    m.set(y, x, Complex::new(T::of(block[r * d + c]), T::zero()));
                }
            }
        }
        m
    }

    /// Dense spectral decomposition assembled from the sector blocks.
    pub fn eigen(&self) -> EigenDecomposition<T> {
        let dim = self.dim();
        let mut cols: Vec<(T, usize, usize)> = Vec::with_capacity(dim);
        for (s, spec) in self.sectors.iter().enumerate() {
            for (l, &v) in spec.eigvals.iter().enumerate() {
                cols.push((v, s, l));
            }
        }
        cols.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite eigenvalue"));
        let mut eigvecs = DenseOperator::zeros(dim).expect("power of two");
        for (j, &(_, s, l)) in cols.iter().enumerate() {
            let spec = &self.sectors[s];
            let d = spec.indices.len();
            for (r, &x) in spec.indices.iter().enumerate() {
                eigvecs.set(x, j, Complex::new(spec.eigvecs[r * d + l], T::zero()));
            }
        }
        EigenDecomposition { eigvals: cols.iter().map(|c| c.0).collect(), eigvecs }
    }

    /// Streams the row-major dense eigenvector matrix, in ascending
    /// eigenvalue order, to `f(row, col, value)` without materialising it.
    pub(crate) fn for_each_eigvec_entry(&self, mut f: impl FnMut(usize, usize, T) -> Result<()>) -> Result<Vec<T>> {
        let mut cols: Vec<(T, usize, usize)> = Vec::new();
        for (s, spec) in self.sectors.iter().enumerate() {
            for (l, &v) in spec.eigvals.iter().enumerate() {
                cols.push((v, s, l));
            }
        }
        cols.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite eigenvalue"));
        let layout = SectorLayout::new(self.n_qubits());
        for row in 0..self.dim() {
            let (ws, pos) = layout.position[row];
            for (j, &(_, s, l)) in cols.iter().enumerate() {
                let v = if s == ws {
                    let d = self.sectors[s].indices.len();
                    self.sectors[s].eigvecs[pos * d + l]
                } else {
                    T::zero()
                };
                f(row, j, v)?;
            }
        }
        Ok(cols.iter().map(|c| c.0).collect())
    }

    fn check_state(&self, state: &StateVector<T>) -> Result<()> {
        if state.n_qubits() != self.n_qubits() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: state.dim() });
        }
        Ok(())
    }

    /// `P|psi>` applied matrix-free from the term list.
    pub fn apply_terms(&self, state: &StateVector<T>) -> Result<StateVector<T>> {
        self.check_state(state)?;
        let mut out = vec![Complex::new(T::zero(), T::zero()); state.dim()];
        for cycle in merge_terms(self.n_qubits(), self.k, &self.terms) {
            let w = T::of(cycle.weight);
            for (x, a) in state.amplitudes().iter().enumerate() {
                out[cycle.permute(x)] += *a * w;
            }
        }
        StateVector::from_amplitudes(out)
    }

    /// `P|psi>` through the cached spectrum.
    pub fn apply(&self, state: &StateVector<T>) -> Result<StateVector<T>> {
        self.check_state(state)?;
        let mut out = state.clone();
        self.spectral_map(std::slice::from_mut(&mut out), |lambda| (lambda, T::zero()));
        Ok(out)
    }

    /// `exp(i c P)|psi>` for every state of the batch, in place.
    pub fn apply_exp_batch(&self, c: T, states: &mut [StateVector<T>]) -> Result<()> {
        for s in states.iter() {
            self.check_state(s)?;
        }
        self.spectral_map(states, |lambda| {
            let z = cis(c * lambda);
            (z.re, z.im)
        });
        Ok(())
    }

    pub fn apply_exp(&self, c: T, state: &StateVector<T>) -> Result<StateVector<T>> {
        let mut out = state.clone();
        self.apply_exp_batch(c, std::slice::from_mut(&mut out))?;
        Ok(out)
    }

    /// Applies `f(P)` with `f(lambda) = re + i im` to each state.
    fn spectral_map(&self, states: &mut [StateVector<T>], f: impl Fn(T) -> (T, T)) {
        let m = 2 * states.len();
        for spec in &self.sectors {
            let d = spec.indices.len();
            let mut x = vec![T::zero(); d * m];
            for (r, &idx) in spec.indices.iter().enumerate() {
                for (b, s) in states.iter().enumerate() {
                    let a = s.amplitudes()[idx];
                    x[r * m + 2 * b] = a.re;
                    x[r * m + 2 * b + 1] = a.im;
                }
            }
            let mut y = vec![T::zero(); d * m];
            // y = V^T x
            T::gemm(d, d, m, T::one(), &spec.eigvecs, (1, d as isize), &x, (m as isize, 1), T::zero(), &mut y, (m as isize, 1));
            for (i, &lambda) in spec.eigvals.iter().enumerate() {
                let (fr, fi) = f(lambda);
                for b in 0..states.len() {
                    let (re, im) = (y[i * m + 2 * b], y[i * m + 2 * b + 1]);
                    y[i * m + 2 * b] = re * fr - im * fi;
                    y[i * m + 2 * b + 1] = re * fi + im * fr;
                }
            }
            // x = V y
            T::gemm(d, d, m, T::one(), &spec.eigvecs, (d as isize, 1), &y, (m as isize, 1), T::zero(), &mut x, (m as isize, 1));
            for (r, &idx) in spec.indices.iter().enumerate() {
                for (b, s) in states.iter_mut().enumerate() {
                    s.amplitudes_mut()[idx] = Complex::new(x[r * m + 2 * b], x[r * m + 2 * b + 1]);
                }
            }
        }
    }

    /// One step of the adjoint sweep through the gate `exp(i c P)`.
    ///
    /// On entry `psis[b]`, `lams[b]` are the state and adjoint vector just
    /// after the gate. Adds `dL/dc = -2 Im <lam|P|psi>` to `grads[b]` and
    /// rewinds both vectors through the inverse gate.
    pub(crate) fn reverse_step(&self, c: T, psis: &mut [StateVector<T>], lams: &mut [StateVector<T>], grads: &mut [T]) {
        let batch = psis.len();
        let m = 4 * batch;
        let two = T::of(2.0);
        for spec in &self.sectors {
            let d = spec.indices.len();
            let mut x = vec![T::zero(); d * m];
            for (r, &idx) in spec.indices.iter().enumerate() {
                for b in 0..batch {
                    let (a, l) = (psis[b].amplitudes()[idx], lams[b].amplitudes()[idx]);
                    let row = &mut x[r * m + 4 * b..r * m + 4 * b + 4];
                    row.copy_from_slice(&[a.re, a.im, l.re, l.im]);
                }
            }
            let mut y = vec![T::zero(); d * m];
            T::gemm(d, d, m, T::one(), &spec.eigvecs, (1, d as isize), &x, (m as isize, 1), T::zero(), &mut y, (m as isize, 1));
            for (i, &lambda) in spec.eigvals.iter().enumerate() {
                let z = cis(-c * lambda);
                for b in 0..batch {
                    let row = &mut y[i * m + 4 * b..i * m + 4 * b + 4];
                    let (ar, ai, lr, li) = (row[0], row[1], row[2], row[3]);
                    grads[b] -= two * lambda * (lr * ai - li * ar);
                    row[0] = ar * z.re - ai * z.im;
                    row[1] = ar * z.im + ai * z.re;
                    row[2] = lr * z.re - li * z.im;
                    row[3] = lr * z.im + li * z.re;
                }
            }
            T::gemm(d, d, m, T::one(), &spec.eigvecs, (d as isize, 1), &y, (m as isize, 1), T::zero(), &mut x, (m as isize, 1));
            for (r, &idx) in spec.indices.iter().enumerate() {
                for b in 0..batch {
                    let row = &x[r * m + 4 * b..r * m + 4 * b + 4];
                    psis[b].amplitudes_mut()[idx] = Complex::new(row[0], row[1]);
                    lams[b].amplitudes_mut()[idx] = Complex::new(row[2], row[3]);
                }
            }
        }
    }
}
