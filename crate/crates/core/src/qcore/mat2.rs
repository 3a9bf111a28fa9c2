use std::ops::Mul;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T>(pub [[Complex<T>; 2]; 2]);

impl<T: Scalar> Mat2<T> {
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn identity() -> Self {
        let (o, z) = (Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()));
        Mat2([[o, z], [z, o]])
    }

    pub fn pauli_x() -> Self {
        let (o, z) = (Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()));
        Mat2([[z, o], [o, z]])
    }

    pub fn pauli_y() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Mat2([[z, Complex::new(T::zero(), -T::one())], [Complex::new(T::zero(), T::one()), z]])
    }

    pub fn pauli_z() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Mat2([[Complex::new(T::one(), T::zero()), z], [z, Complex::new(-T::one(), T::zero())]])
    }

    /// The three Pauli matrices in (X, Y, Z) order.
    pub fn paulis() -> [Self; 3] {
        [Self::pauli_x(), Self::pauli_y(), Self::pauli_z()]
    }

    pub fn hadamard() -> Self {
        let h = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
        Mat2([[h, h], [h, -h]])
    }

    /// `R_z(a) = diag(e^{-ia/2}, e^{ia/2})`.
    pub fn rz(angle: T) -> Self {
        let half = angle / T::of(2.0);
        let z = Complex::new(T::zero(), T::zero());
        Mat2([[Complex::new(half.cos(), -half.sin()), z], [z, Complex::new(half.cos(), half.sin())]])
    }

    /// `R_y(b) = [[cos b/2, -sin b/2], [sin b/2, cos b/2]]`.
    pub fn ry(angle: T) -> Self {
        let half = angle / T::of(2.0);
        let (c, s) = (Complex::new(half.cos(), T::zero()), Complex::new(half.sin(), T::zero()));
        Mat2([[c, -s], [s, c]])
    }

    /// The SU(2) element `w I - i (x X + y Y + z Z)` of a unit quaternion.
    pub fn from_quaternion(q: [T; 4]) -> Self {
        let [w, x, y, z] = q;
        Mat2([
            [Complex::new(w, -z), Complex::new(-y, -x)],
            [Complex::new(y, -x), Complex::new(w, z)],
        ])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn det(&self) -> Complex<T> {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> Complex<T> {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        worst
    }

    /// `||u^dagger u - I||_max`.
    pub fn unitarity_residual(&self) -> T {
        (self.adjoint() * *self).max_abs_diff(&Self::identity())
    }

    pub fn check_unitary(&self) -> Result<()> {
        if self.0.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("2x2 matrix"));
        }
        let residual = self.unitarity_residual();
        if residual > T::validation_tol() {
            return Err(Error::NotUnitary { residual: residual.as_f64() });
        }
        Ok(())
    }

    pub fn check_special_unitary(&self) -> Result<()> {
        self.check_unitary()?;
        let residual = (self.det() - Complex::new(T::one(), T::zero())).norm();
        if residual > T::validation_tol() {
            return Err(Error::NotSpecialUnitary { residual: residual.as_f64() });
        }
        Ok(())
    }
}

impl<T: Scalar> Mul for Mat2<T> {
    type Output = Mat2<T>;

    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[Complex::new(T::zero(), T::zero()); 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Mat2(out)
    }
}
