use num_complex::Complex;

use super::{Mat2, StateVector, WirePermutation};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A dense `dim x dim` complex matrix on a qubit register, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator<T> {
    dim: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Scalar> DenseOperator<T> {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        Ok(DenseOperator { dim, entries: vec![Complex::new(T::zero(), T::zero()); dim * dim] })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.entries[i * dim + i] = Complex::new(T::one(), T::zero());
        }
        Ok(m)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for r in 0..dim {
            for c in 0..dim {
                m.entries[r * dim + c] = f(r, c);
            }
        }
        Ok(m)
    }

    pub fn from_mat2(u: &Mat2<T>) -> Self {
        DenseOperator { dim: 2, entries: u.0.iter().flatten().copied().collect() }
    }

    /// `u` acting on `wire` of an `n`-qubit register.
    pub fn embed_single(n_qubits: usize, wire: usize, u: &Mat2<T>) -> Self {
        let dim = 1usize << n_qubits;
        let shift = n_qubits - 1 - wire;
        let mut m = Self::zeros(dim).expect("power of two");
        for r in 0..dim {
            for c in 0..dim {
                if (r ^ c) & !(1 << shift) == 0 {
                    m.entries[r * dim + c] = u.0[(r >> shift) & 1][(c >> shift) & 1];
                }
            }
        }
        m
    }

    /// Explicit permutation matrix of `sigma` acting on wires. Materialises
    /// a `2^n x 2^n` matrix, so it is meant for small registers and oracles.
    pub fn from_wire_permutation(sigma: &WirePermutation) -> Self {
        let dim = 1usize << sigma.len();
        let mut m = Self::zeros(dim.max(2)).expect("power of two");
        for x in 0..dim {
            m.entries[sigma.permute_index(x) * m.dim + x] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        self.entries[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex<T>) {
        self.entries[r * self.dim + c] = v;
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut entries = self.entries.clone();
        for r in 0..d {
            for c in 0..d {
                entries[c * d + r] = self.entries[r * d + c].conj();
            }
        }
        DenseOperator { dim: d, entries }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(DenseOperator { dim: self.dim, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(DenseOperator { dim: self.dim, entries })
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        DenseOperator { dim: self.dim, entries: self.entries.iter().map(|a| a * s).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let d = self.dim;
        let mut out = Self::zeros(d)?;
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for c in 0..d {
                    out.entries[r * d + c] += a * other.entries[k * d + c];
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product `self ⊗ other`; `self` occupies the leading wires.
    pub fn kron(&self, other: &Self) -> Self {
        let (da, db) = (self.dim, other.dim);
        let d = da * db;
        let mut entries = vec![Complex::new(T::zero(), T::zero()); d * d];
        for ra in 0..da {
            for ca in 0..da {
                let a = self.entries[ra * da + ca];
                for rb in 0..db {
                    for cb in 0..db {
                        entries[(ra * db + rb) * d + ca * db + cb] = a * other.entries[rb * db + cb];
                    }
                }
            }
        }
        DenseOperator { dim: d, entries }
    }

    pub fn apply(&self, state: &StateVector<T>) -> Result<StateVector<T>> {
        state.check_dim(self.dim)?;
        let d = self.dim;
        let psi = state.amplitudes();
        let amps = (0..d)
            .map(|r| {
                self.entries[r * d..(r + 1) * d]
                    .iter()
                    .zip(psi)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (m, a)| acc + m * a)
            })
            .collect();
        StateVector::from_amplitudes(amps)
    }

    pub fn max_abs(&self) -> T {
        self.entries.iter().fold(T::zero(), |m, a| m.max(a.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_same_dim(other)?;
        Ok(self.entries.iter().zip(&other.entries).fold(T::zero(), |m, (a, b)| m.max((a - b).norm())))
    }

    /// `||A - A^dagger||_max`.
    pub fn hermiticity_residual(&self) -> T {
        let d = self.dim;
        let mut worst = T::zero();
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self.entries[r * d + c] - self.entries[c * d + r].conj()).norm());
            }
        }
        worst
    }

    /// `||A^dagger A - I||_max`.
    pub fn unitarity_residual(&self) -> T {
        let prod = self.adjoint().matmul(self).expect("same dimension");
        prod.max_abs_diff(&Self::identity(self.dim).expect("valid dimension")).expect("same dimension")
    }

    pub fn check_hermitian(&self) -> Result<()> {
        if self.entries.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("operator entries"));
        }
        let residual = self.hermiticity_residual();
        if residual > T::validation_tol() {
            return Err(Error::NotHermitian { residual: residual.as_f64() });
        }
        Ok(())
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }
}

/// `exp(a)` by scaling and squaring a truncated Taylor series. Independent of
/// any eigendecomposition, which makes it a reference for small operators.
pub fn expm<T: Scalar>(a: &DenseOperator<T>) -> DenseOperator<T> {
    let norm = (0..a.dim)
        .map(|r| (0..a.dim).map(|c| a.get(r, c).norm()).sum::<T>())
        .fold(T::zero(), T::max);
    let mut squarings = 0;
    let mut scale = T::one();
    while norm * scale > T::of(0.5) {
        scale /= T::of(2.0);
        squarings += 1;
    }
    let x = a.scale(Complex::new(scale, T::zero()));
    let mut result = DenseOperator::identity(a.dim).expect("valid dimension");
    let mut term = result.clone();
    for k in 1..=24 {
        term = term.matmul(&x).expect("same dimension").scale(Complex::new(T::one() / T::of_usize(k), T::zero()));
        result = result.add(&term).expect("same dimension");
    }
    for _ in 0..squarings {
        result = result.matmul(&result).expect("same dimension");
    }
    result
}

/// `Re <psi|H|psi>` for Hermitian `h`.
pub fn expectation<T: Scalar>(state: &StateVector<T>, h: &DenseOperator<T>) -> Result<T> {
    h.check_hermitian()?;
    let hpsi = h.apply(state)?;
    Ok(state.inner(&hpsi)?.re)
}
