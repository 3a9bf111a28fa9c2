use num_complex::Complex;

use crate::error::{Error, Result};
use crate::qcore::{eig_hermitian, DenseOperator, Mat2, WirePermutation};
use crate::scalar::Scalar;

/// A 3x3 real matrix, row-major.
pub type Rotation3<T> = [[T; 3]; 3];

/// Register size bound for the brute-force joint-invariant computation.
pub const MAX_JOINT_INVARIANT_QUBITS: usize = 6;

/// Lifts a permutation of pairs to the wires: pair `l` occupies wires
/// `(2l, 2l+1)`, which move jointly to `(2 sigma(l), 2 sigma(l) + 1)`.
pub fn pair_permutation_rep(n_pairs: usize, sigma: &[usize]) -> Result<WirePermutation> {
    if sigma.len() != n_pairs {
        return Err(Error::DimensionMismatch { expected: n_pairs, got: sigma.len() });
    }
    let pairs = WirePermutation::new(sigma.to_vec())?;
    let image = (0..2 * n_pairs).map(|w| 2 * pairs.apply(w / 2) + w % 2).collect();
    WirePermutation::new(image)
}

/// The covering map `R_kj = 1/2 Tr(sigma_k u sigma_j u^dagger)`.
pub fn su2_to_so3<T: Scalar>(u: &Mat2<T>) -> Result<Rotation3<T>> {
    u.check_special_unitary()?;
    let paulis = Mat2::<T>::paulis();
    let ud = u.adjoint();
    let mut r = [[T::zero(); 3]; 3];
    for (k, sk) in paulis.iter().enumerate() {
        for (j, sj) in paulis.iter().enumerate() {
            r[k][j] = (*sk * *u * *sj * ud).trace().re * T::of(0.5);
        }
    }
    Ok(r)
}

/// One of the two SU(2) lifts of a rotation matrix (the other is its
/// negative), via the quaternion of `r`.
pub fn so3_to_su2<T: Scalar>(r: &Rotation3<T>) -> Mat2<T> {
    let one = T::one();
    let quarter = T::of(0.25);
    let trace = r[0][0] + r[1][1] + r[2][2];
    // branch on the largest quaternion component for conditioning
    let q = if trace > T::zero() {
        let s = (trace + one).sqrt() * T::of(2.0);
        [quarter * s, (r[2][1] - r[1][2]) / s, (r[0][2] - r[2][0]) / s, (r[1][0] - r[0][1]) / s]
    } else if r[0][0] > r[1][1] && r[0][0] > r[2][2] {
        let s = (one + r[0][0] - r[1][1] - r[2][2]).sqrt() * T::of(2.0);
        [(r[2][1] - r[1][2]) / s, quarter * s, (r[0][1] + r[1][0]) / s, (r[0][2] + r[2][0]) / s]
    } else if r[1][1] > r[2][2] {
        let s = (one + r[1][1] - r[0][0] - r[2][2]).sqrt() * T::of(2.0);
        [(r[0][2] - r[2][0]) / s, (r[0][1] + r[1][0]) / s, quarter * s, (r[1][2] + r[2][1]) / s]
    } else {
        let s = (one + r[2][2] - r[0][0] - r[1][1]).sqrt() * T::of(2.0);
        [(r[1][0] - r[0][1]) / s, (r[0][2] + r[2][0]) / s, (r[1][2] + r[2][1]) / s, quarter * s]
    };
    let n = q.iter().map(|&c| c * c).sum::<T>().sqrt();
    Mat2::from_quaternion([q[0] / n, q[1] / n, q[2] / n, q[3] / n])
}

/// Rank of `S Q`, where `S` projects onto the fully symmetric subspace of
/// `n` qubits (the average of all `n!` wire permutations) and `Q` projects
/// onto the SU(2)-invariant vectors (the common kernel of the total-spin
/// generators). Computed by brute force.
pub fn joint_invariant_dim(n: usize) -> Result<usize> {
    if n < 1 {
        return Err(Error::TooSmall { what: "qubit count", value: n, min: 1 });
    }
    if n > MAX_JOINT_INVARIANT_QUBITS {
        return Err(Error::TooLarge { what: "qubit count", value: n, limit: MAX_JOINT_INVARIANT_QUBITS });
    }
    let dim = 1usize << n;
    let zero = Complex::new(0.0f64, 0.0);

    let perms = WirePermutation::all(n);
    let weight = 1.0 / perms.len() as f64;
    let mut sym = vec![zero; dim * dim];
    for p in &perms {
        for x in 0..dim {
            sym[p.permute_index(x) * dim + x] += weight;
        }
    }

    // Casimir sum_a S_a^2 vanishes exactly on the SU(2)-invariant vectors
    let mut casimir = vec![zero; dim * dim];
    for pauli in Mat2::<f64>::paulis() {
        let mut total = DenseOperator::<f64>::zeros(dim.max(2))?;
        for w in 0..n {
            total = total.add(&embed(n, w, &pauli))?;
        }
        let sq = total.matmul(&total)?;
        for (c, s) in casimir.iter_mut().zip(sq.entries()) {
            *c += s;
        }
    }
    let casimir = DenseOperator::from_fn(dim.max(2), |r, c| if r < dim && c < dim { casimir[r * dim + c] } else { zero })?;
    let spin = eig_hermitian(&casimir)?;
    let mut q = vec![zero; dim * dim];
    for (l, &v) in spin.eigvals.iter().enumerate() {
        if v.abs() < 1e-8 {
            for r in 0..dim {
                for c in 0..dim {
                    q[r * dim + c] += spin.eigvecs.get(r, l) * spin.eigvecs.get(c, l).conj();
                }
            }
        }
    }

    // rank(S Q) = number of nonzero eigenvalues of (S Q)^dagger (S Q) = Q S Q
    let sq = matmul(&sym, &q, dim);
    let qsq = matmul(&q, &sq, dim);
    let gram = DenseOperator::from_fn(dim.max(2), |r, c| if r < dim && c < dim { qsq[r * dim + c] } else { zero })?;
    let eig = eig_hermitian(&gram)?;
    Ok(eig.eigvals.iter().filter(|v| v.abs() > 1e-8).count())
}

fn embed(n: usize, wire: usize, u: &Mat2<f64>) -> DenseOperator<f64> {
    if n == 1 {
        DenseOperator::from_mat2(u)
    } else {
        DenseOperator::embed_single(n, wire, u)
    }
}

fn matmul(a: &[Complex<f64>], b: &[Complex<f64>], d: usize) -> Vec<Complex<f64>> {
    let mut out = vec![Complex::new(0.0, 0.0); d * d];
    for r in 0..d {
        for k in 0..d {
            let x = a[r * d + k];
            for c in 0..d {
                out[r * d + c] += x * b[k * d + c];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_rep_examples() {
        assert!(pair_permutation_rep(3, &[0, 1, 2]).unwrap().is_identity());
        assert_eq!(pair_permutation_rep(2, &[1, 0]).unwrap().image(), &[2, 3, 0, 1]);
        // pair cycle 0 -> 1 -> 2 -> 0
        assert_eq!(pair_permutation_rep(3, &[1, 2, 0]).unwrap().image(), &[2, 3, 4, 5, 0, 1]);
        assert!(matches!(pair_permutation_rep(2, &[1, 1]), Err(Error::NotBijection { .. })));
    }

    #[test]
    fn covering_map_examples() {
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let r = su2_to_so3(&Mat2::<f64>::identity()).unwrap();
        assert_eq!(r, id);
        let r = su2_to_so3(&Mat2::<f64>::identity().scale(Complex::new(-1.0, 0.0))).unwrap();
        assert_eq!(r, id);
        let r = su2_to_so3(&Mat2::<f64>::rz(std::f64::consts::FRAC_PI_2)).unwrap();
        let expect = [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((r[i][j] - expect[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn covering_map_rejects_non_su2() {
        let u = Mat2::<f64>::identity().scale(Complex::new(0.0, 1.0));
        assert!(matches!(su2_to_so3(&u), Err(Error::NotSpecialUnitary { .. })));
    }

    #[test]
    fn joint_invariant_small_registers() {
        assert_eq!(joint_invariant_dim(1).unwrap(), 0);
        assert_eq!(joint_invariant_dim(2).unwrap(), 0);
        assert!(joint_invariant_dim(0).is_err());
        assert!(joint_invariant_dim(7).is_err());
    }
}
