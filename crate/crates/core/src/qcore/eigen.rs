use num_complex::Complex;

use super::{DenseOperator, StateVector};
use crate::error::{Error, Result};
use crate::scalar::{cis, Scalar};

const MAX_SWEEPS: usize = 100;

/// Spectral decomposition `A = V diag(eigvals) V^dagger` of a Hermitian
/// operator. Eigenvalues ascend; column `j` of `eigvecs` pairs with
/// `eigvals[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition<T> {
    pub eigvals: Vec<T>,
    pub eigvecs: DenseOperator<T>,
}

impl<T: Scalar> EigenDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigvals.len()
    }

    /// `V diag(eigvals) V^dagger`.
    pub fn reconstruct(&self) -> DenseOperator<T> {
        let d = self.dim();
        let v = &self.eigvecs;
        DenseOperator::from_fn(d, |r, c| {
            (0..d).fold(Complex::new(T::zero(), T::zero()), |acc, l| {
                acc + v.get(r, l) * v.get(c, l).conj() * self.eigvals[l]
            })
        })
        .expect("valid dimension")
    }

    /// `exp(i c A)|psi>` evaluated in the eigenbasis.
    pub fn apply_exp_i(&self, c: T, state: &StateVector<T>) -> Result<StateVector<T>> {
        state.check_dim(self.dim())?;
        let d = self.dim();
        let v = &self.eigvecs;
        let psi = state.amplitudes();
        let coeffs: Vec<Complex<T>> = (0..d)
            .map(|l| {
                let proj = (0..d).fold(Complex::new(T::zero(), T::zero()), |acc, r| acc + v.get(r, l).conj() * psi[r]);
                proj * cis(c * self.eigvals[l])
            })
            .collect();
        let amps = (0..d)
            .map(|r| (0..d).fold(Complex::new(T::zero(), T::zero()), |acc, l| acc + v.get(r, l) * coeffs[l]))
            .collect();
        StateVector::from_amplitudes(amps)
    }

    /// Dense `exp(i c A)`.
    pub fn exp_i(&self, c: T) -> DenseOperator<T> {
        let d = self.dim();
        let v = &self.eigvecs;
        DenseOperator::from_fn(d, |r, col| {
            (0..d).fold(Complex::new(T::zero(), T::zero()), |acc, l| {
                acc + v.get(r, l) * v.get(col, l).conj() * cis(c * self.eigvals[l])
            })
        })
        .expect("valid dimension")
    }
}

/// Eigendecomposition of a Hermitian operator by cyclic complex Jacobi
/// rotations.
pub fn eig_hermitian<T: Scalar>(a: &DenseOperator<T>) -> Result<EigenDecomposition<T>> {
    a.check_hermitian()?;
    let n = a.dim();
    let mut m: Vec<Complex<T>> = a.entries().to_vec();
    // symmetrise so that round-off in the input cannot leak into the result
    for r in 0..n {
        m[r * n + r] = Complex::new(m[r * n + r].re, T::zero());
        for c in r + 1..n {
            let avg = (m[r * n + c] + m[c * n + r].conj()) * T::of(0.5);
            m[r * n + c] = avg;
            m[c * n + r] = avg.conj();
        }
    }
    let mut v = DenseOperator::<T>::identity(n)?.entries().to_vec();
    let scale = a.max_abs().max(T::min_positive_value());
    let target = T::epsilon() * scale;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off = (0..n)
            .flat_map(|r| (r + 1..n).map(move |c| (r, c)))
            .fold(T::zero(), |acc, (r, c)| acc.max(m[r * n + c].norm()));
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, n, p, q, target);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[x * n + x].re.partial_cmp(&m[y * n + y].re).expect("finite eigenvalue"));
    let eigvals = order.iter().map(|&i| m[i * n + i].re).collect();
    let eigvecs = DenseOperator::from_fn(n, |r, c| v[r * n + order[c]])?;
    Ok(EigenDecomposition { eigvals, eigvecs })
}

/// One Jacobi rotation zeroing the `(p, q)` entry: `A <- G^dagger A G`,
/// `V <- V G`, with `G` a phase on column `q` followed by a real rotation.
fn rotate<T: Scalar>(m: &mut [Complex<T>], v: &mut [Complex<T>], n: usize, p: usize, q: usize, floor: T) {
    let apq = m[p * n + q];
    let r = apq.norm();
    if r <= floor * T::of(1e-3) {
        return;
    }
    let phase = Complex::new(apq.re / r, -apq.im / r);
    let (app, aqq) = (m[p * n + p].re, m[q * n + q].re);
    let theta = (aqq - app) / (T::of(2.0) * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    let g_pp = Complex::new(c, T::zero());
    let g_pq = Complex::new(s, T::zero());
    let g_qp = phase * (-s);
    let g_qq = phase * c;

    for i in 0..n {
        let (ap, aq) = (m[i * n + p], m[i * n + q]);
        m[i * n + p] = ap * g_pp + aq * g_qp;
        m[i * n + q] = ap * g_pq + aq * g_qq;
        let (vp, vq) = (v[i * n + p], v[i * n + q]);
        v[i * n + p] = vp * g_pp + vq * g_qp;
        v[i * n + q] = vp * g_pq + vq * g_qq;
    }
    for j in 0..n {
        let (bp, bq) = (m[p * n + j], m[q * n + j]);
        m[p * n + j] = g_pp.conj() * bp + g_qp.conj() * bq;
        m[q * n + j] = g_pq.conj() * bp + g_qq.conj() * bq;
    }
    m[p * n + q] = Complex::new(T::zero(), T::zero());
    m[q * n + p] = Complex::new(T::zero(), T::zero());
    m[p * n + p] = Complex::new(m[p * n + p].re, T::zero());
    m[q * n + q] = Complex::new(m[q * n + q].re, T::zero());
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::Mat2;

    #[test]
    fn pauli_spectra() {
        let z = eig_hermitian(&DenseOperator::from_mat2(&Mat2::<f64>::pauli_z())).unwrap();
        assert_eq!(z.eigvals, vec![-1.0, 1.0]);
        let id = eig_hermitian(&DenseOperator::<f64>::identity(4).unwrap()).unwrap();
        assert_eq!(id.eigvals, vec![1.0; 4]);

        let x = eig_hermitian(&DenseOperator::from_mat2(&Mat2::<f64>::pauli_x())).unwrap();
        assert!((x.eigvals[0] + 1.0).abs() < 1e-14 && (x.eigvals[1] - 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // |-> and |+> up to a global phase
        let minus = (x.eigvecs.get(0, 0) * h - x.eigvecs.get(1, 0) * h).norm();
        let plus = (x.eigvecs.get(0, 1) * h + x.eigvecs.get(1, 1) * h).norm();
        assert!((minus - 1.0).abs() < 1e-12 && (plus - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = DenseOperator::<f64>::identity(2).unwrap();
        m.set(0, 1, Complex::new(1.0, 0.0));
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn complex_hermitian_reconstructs() {
        let m = DenseOperator::<f64>::from_fn(8, |r, c| {
            let (a, b) = (r.min(c) as f64, r.max(c) as f64);
            let im = if r < c { (a - b).sin() } else if r > c { -(a - b).sin() } else { 0.0 };
            Complex::new((a * 0.3 + b * 0.7).cos(), im)
        })
        .unwrap();
        let e = eig_hermitian(&m).unwrap();
        assert!(e.reconstruct().max_abs_diff(&m).unwrap() < 1e-12);
        assert!(e.eigvecs.unitarity_residual() < 1e-12);
    }
}
