use num_complex::Complex;

use super::{Mat2, WirePermutation};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Single-qubit Pauli operator label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
}

/// Dense statevector over `2^n_qubits` computational basis states.
///
/// Basis convention: wire 0 is the most significant bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    n_qubits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Scalar> StateVector<T> {
    /// `|0..0>`.
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n_qubits];
        amps[index] = Complex::new(T::one(), T::zero());
        StateVector { n_qubits, amps }
    }

    /// Wraps raw amplitudes; the length must be a power of two. No
    /// normalization is applied.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let len = amps.len();
        if len < 1 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        Ok(StateVector { n_qubits: len.trailing_zeros() as usize, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > T::zero() {
            for a in &mut self.amps {
                *a /= n;
            }
        }
        self
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.check_dim(other.dim())?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b))
    }

    /// `||self - other||_2`.
    pub fn distance(&self, other: &Self) -> Result<T> {
        self.check_dim(other.dim())?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<T>().sqrt())
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: dim });
        }
        Ok(())
    }

    fn check_wire(&self, wire: usize) -> Result<()> {
        if wire >= self.n_qubits {
            return Err(Error::WireOutOfRange { wire, n_qubits: self.n_qubits });
        }
        Ok(())
    }

    /// `(I ⊗ .. ⊗ u ⊗ .. ⊗ I)|psi>` with `u` on `wire`.
    pub fn apply_single_qubit(&self, wire: usize, u: &Mat2<T>) -> Result<Self> {
        let mut out = self.clone();
        out.apply_single_qubit_in_place(wire, u)?;
        Ok(out)
    }

    pub fn apply_single_qubit_in_place(&mut self, wire: usize, u: &Mat2<T>) -> Result<()> {
        self.check_wire(wire)?;
        u.check_unitary()?;
        self.apply_matrix_unchecked(wire, u);
        Ok(())
    }

    /// Applies any 2x2 matrix, unitary or not, on `wire`.
    pub(crate) fn apply_matrix_unchecked(&mut self, wire: usize, u: &Mat2<T>) {
        let stride = 1usize << (self.n_qubits - 1 - wire);
        let m = &u.0;
        for base in (0..self.amps.len()).step_by(2 * stride) {
            for i in base..base + stride {
                let (a0, a1) = (self.amps[i], self.amps[i + stride]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i + stride] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// Permutes tensor factors: the bit on wire `w` moves to wire `sigma(w)`.
    pub fn apply_wire_permutation(&self, sigma: &WirePermutation) -> Result<Self> {
        if sigma.len() != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, got: sigma.len() });
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); self.dim()];
        for (x, a) in self.amps.iter().enumerate() {
            amps[sigma.permute_index(x)] = *a;
        }
        Ok(StateVector { n_qubits: self.n_qubits, amps })
    }

    /// Applies the Pauli string `p ⊗ p` on wires `a` and `b` and accumulates
    /// `weight * (p_a p_b)|self>` into `out`.
    pub fn accumulate_pauli_pair(&self, a: usize, b: usize, p: Pauli, weight: T, out: &mut [Complex<T>]) {
        let n = self.n_qubits;
        let (ma, mb) = (1usize << (n - 1 - a), 1usize << (n - 1 - b));
        match p {
            Pauli::X => {
                for (x, amp) in self.amps.iter().enumerate() {
                    out[x ^ ma ^ mb] += *amp * weight;
                }
            }
            Pauli::Y => {
                // Y|0> = i|1>, Y|1> = -i|0>, so Y⊗Y picks up -(-1)^{x_a + x_b}
                for (x, amp) in self.amps.iter().enumerate() {
                    let parity = ((x & ma != 0) as u8) ^ ((x & mb != 0) as u8);
                    let w = if parity == 0 { -weight } else { weight };
                    out[x ^ ma ^ mb] += *amp * w;
                }
            }
            Pauli::Z => {
                for (x, amp) in self.amps.iter().enumerate() {
                    let parity = ((x & ma != 0) as u8) ^ ((x & mb != 0) as u8);
                    let w = if parity == 0 { weight } else { -weight };
                    out[x] += *amp * w;
                }
            }
        }
    }

    /// `<psi| p_a p_b |psi>` (real because the operator is Hermitian).
    pub fn pauli_pair_expectation(&self, a: usize, b: usize, p: Pauli) -> T {
        let n = self.n_qubits;
        let (ma, mb) = (1usize << (n - 1 - a), 1usize << (n - 1 - b));
        let mut acc = T::zero();
        for (x, amp) in self.amps.iter().enumerate() {
            let parity = ((x & ma != 0) as u8) ^ ((x & mb != 0) as u8);
            let sign = if parity == 0 { T::one() } else { -T::one() };
            match p {
                Pauli::X => {
                    let y = self.amps[x ^ ma ^ mb];
                    acc += (y.conj() * amp).re;
                }
                Pauli::Y => {
                    let y = self.amps[x ^ ma ^ mb];
                    acc -= sign * (y.conj() * amp).re;
                }
                Pauli::Z => acc += sign * amp.norm_sqr(),
            }
        }
        acc
    }
}
