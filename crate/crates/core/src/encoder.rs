//! Point encoding `E(p) = exp(i (p . sigma) / theta)` and its Z-Y-Z
//! decomposition.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::qcore::{Mat2, StateVector};
use crate::scalar::Scalar;

pub const DEFAULT_THETA: f64 = 1.7;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Point3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Point3 { x, y, z }
    }

    pub fn from_array([x, y, z]: [T; 3]) -> Self {
        Point3 { x, y, z }
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: T) -> Self {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn add(self, o: Self) -> Self {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn sub(self, o: Self) -> Self {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn distance(self, o: Self) -> T {
        self.sub(o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn cast<U: Scalar>(self) -> Point3<U> {
        Point3::new(U::of(self.x.as_f64()), U::of(self.y.as_f64()), U::of(self.z.as_f64()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncoderConfig<T> {
    theta: T,
}

impl<T: Scalar> EncoderConfig<T> {
    pub fn new(theta: T) -> Result<Self> {
        if !(theta.is_finite() && theta > T::zero()) {
            return Err(Error::InvalidTheta(theta.as_f64()));
        }
        Ok(EncoderConfig { theta })
    }

    pub fn theta(&self) -> T {
        self.theta
    }
}

impl<T: Scalar> Default for EncoderConfig<T> {
    fn default() -> Self {
        EncoderConfig { theta: T::of(DEFAULT_THETA) }
    }
}

/// Rotation angle `phi = |p| / theta`, checked against `phi < pi/2`.
fn angle<T: Scalar>(p: Point3<T>, cfg: &EncoderConfig<T>) -> Result<T> {
    if !p.is_finite() {
        return Err(Error::NonFinite("point coordinate"));
    }
    let phi = p.norm() / cfg.theta;
    if phi >= T::FRAC_PI_2() {
        return Err(Error::EncodingAngle { phi: phi.as_f64() });
    }
    Ok(phi)
}

/// `cos(phi) I + i sin(phi) (n . sigma)`.
pub fn encode_unitary<T: Scalar>(p: Point3<T>, cfg: &EncoderConfig<T>) -> Result<Mat2<T>> {
    let phi = angle(p, cfg)?;
    let r = p.norm();
    if r == T::zero() {
        return Ok(Mat2::identity());
    }
    let (c, s) = (phi.cos(), phi.sin() / r);
    let (sx, sy, sz) = (s * p.x, s * p.y, s * p.z);
    Ok(Mat2::new(
        Complex::new(c, sz),
        Complex::new(sy, sx),
        Complex::new(-sy, sx),
        Complex::new(c, -sz),
    ))
}

/// Angles `(alpha, beta, gamma)` with `R_z(alpha) R_y(beta) R_z(gamma) = E(p)`.
///
/// The sum `alpha + gamma` comes from the phase of the diagonal and the
/// difference from the phase of the off-diagonal, both through `atan2`.
/// `beta` uses the arcsine relation while its denominator and argument are
/// well away from 0 and 1 respectively, and `atan2` of the entry moduli
/// otherwise.
pub fn zyz_angles<T: Scalar>(p: Point3<T>, cfg: &EncoderConfig<T>) -> Result<(T, T, T)> {
    let phi = angle(p, cfg)?;
    let r = p.norm();
    let two = T::of(2.0);
    if r <= T::of(1e-12) {
        return Ok((T::zero(), T::zero(), T::zero()));
    }
    let (nx, ny, nz) = (p.x / r, p.y / r, p.z / r);
    if nx == T::zero() && ny == T::zero() {
        return Ok((-two * phi * nz.signum(), T::zero(), T::zero()));
    }
    let (c, s) = (phi.cos(), phi.sin());
    let sum = -two * (s * nz).atan2(c);
    let diff = -two * (-nx).atan2(-ny);
    let alpha = (sum + diff) / two;
    let gamma = (sum - diff) / two;

    let denom = (diff / two).sin();
    let arg = s * nx / denom;
    let beta = if denom.abs() >= T::of(0.1) && arg.abs() <= T::of(0.99) {
        two * arg.asin()
    } else {
        let off = s * (nx * nx + ny * ny).sqrt();
        let diag = (c * c + s * s * nz * nz).sqrt();
        two * off.atan2(diag)
    };
    Ok((alpha, beta, gamma))
}

pub fn zyz_unitary<T: Scalar>(alpha: T, beta: T, gamma: T) -> Mat2<T> {
    Mat2::rz(alpha) * Mat2::ry(beta) * Mat2::rz(gamma)
}

/// `max |a - e^{i t} b|` with the phase `t` aligned on the largest entry of `a`.
pub fn phase_aligned_residual<T: Scalar>(a: &Mat2<T>, b: &Mat2<T>) -> T {
    let mut best = (0, 0);
    for i in 0..2 {
        for j in 0..2 {
            if a.0[i][j].norm() > a.0[best.0][best.1].norm() {
                best = (i, j);
            }
        }
    }
    let (x, y) = (a.0[best.0][best.1], b.0[best.0][best.1]);
    let phase = if y.norm() > T::zero() && x.norm() > T::zero() {
        let z = x / y;
        z / z.norm()
    } else {
        Complex::new(T::one(), T::zero())
    };
    a.max_abs_diff(&b.scale(phase))
}

/// Encoding unitaries for a point list; unitary `i` acts on wire `2i` and
/// the odd wires are left alone.
pub fn encoding_layer<T: Scalar>(points: &[Point3<T>], cfg: &EncoderConfig<T>) -> Result<Vec<Mat2<T>>> {
    if points.is_empty() {
        return Err(Error::TooSmall { what: "point count", value: 0, min: 1 });
    }
    points.iter().map(|&p| encode_unitary(p, cfg)).collect()
}

/// Applies an encoding layer to a register of `2 * layer.len()` qubits.
pub fn apply_encoding<T: Scalar>(state: &mut StateVector<T>, layer: &[Mat2<T>]) -> Result<()> {
    if state.n_qubits() != 2 * layer.len() {
        return Err(Error::DimensionMismatch { expected: state.n_qubits(), got: 2 * layer.len() });
    }
    for (i, u) in layer.iter().enumerate() {
        // encode_unitary output is unitary by construction
        state.apply_matrix_unchecked(2 * i, u);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::su2_to_so3;
    use crate::random::{random_rotation, rotate};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> EncoderConfig<f64> {
        EncoderConfig::default()
    }

    #[test]
    fn origin_is_identity() {
        let u = encode_unitary(Point3::new(0.0, 0.0, 0.0), &cfg()).unwrap();
        assert_eq!(u, Mat2::identity());
        assert_eq!(zyz_angles(Point3::new(0.0, 0.0, 0.0), &cfg()).unwrap(), (0.0, 0.0, 0.0));
    }

    #[test]
    fn z_axis_is_diagonal() {
        let z = 0.8;
        let u = encode_unitary(Point3::new(0.0, 0.0, z), &cfg()).unwrap();
        let t = z / 1.7;
        let expect = Mat2::new(Complex::new(t.cos(), t.sin()), Complex::default(), Complex::default(), Complex::new(t.cos(), -t.sin()));
        assert!(u.max_abs_diff(&expect) < 1e-15);
        let (a, b, g) = zyz_angles(Point3::new(0.0, 0.0, z), &cfg()).unwrap();
        assert_eq!(b, 0.0);
        assert!((a + g + 2.0 * t).abs() < 1e-15);
    }

    #[test]
    fn rejects_large_angle_and_nan() {
        let c = EncoderConfig::new(1.0).unwrap();
        assert!(matches!(encode_unitary(Point3::new(2.0, 0.0, 0.0), &c), Err(Error::EncodingAngle { .. })));
        assert!(matches!(encode_unitary(Point3::new(f64::NAN, 0.0, 0.0), &c), Err(Error::NonFinite(_))));
        assert!(EncoderConfig::new(0.0).is_err());
        assert!(EncoderConfig::new(-1.0).is_err());
    }

    #[test]
    fn rotation_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let p = Point3::new(rng.random_range(-0.6..0.6), rng.random_range(-0.6..0.6), rng.random_range(-0.6..0.6));
            let (r, u) = random_rotation::<f64, _>(&mut rng);
            let lhs = encode_unitary(rotate(&r, p), &cfg()).unwrap();
            let rhs = u * encode_unitary(p, &cfg()).unwrap() * u.adjoint();
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
            assert!(su2_to_so3(&u).is_ok());
        }
    }

    #[test]
    fn degenerate_axes_reconstruct() {
        for p in [
            Point3::new(0.0, 0.0, -0.5),
            Point3::new(1e-13, 0.0, 0.0),
            Point3::new(1e-15, -1e-15, 0.7),
            Point3::new(0.5, 0.0, 0.0),
            Point3::new(0.0, -0.5, 0.0),
            Point3::new(0.0, 0.0, 0.0),
        ] {
            let (a, b, g) = zyz_angles(p, &cfg()).unwrap();
            let u = encode_unitary(p, &cfg()).unwrap();
            assert!(phase_aligned_residual(&u, &zyz_unitary(a, b, g)) < 1e-12, "{p:?}");
        }
    }

    #[test]
    fn layer_targets_even_wires() {
        let pts = [Point3::new(0.3, 0.1, -0.2), Point3::new(0.0, 0.5, 0.1)];
        let layer = encoding_layer(&pts, &cfg()).unwrap();
        let mut psi = crate::random::random_state::<f64, _>(4, &mut ChaCha8Rng::seed_from_u64(2));
        let mut expect = psi.clone();
        expect = expect.apply_single_qubit(0, &layer[0]).unwrap().apply_single_qubit(2, &layer[1]).unwrap();
        apply_encoding(&mut psi, &layer).unwrap();
        assert!(psi.distance(&expect).unwrap() < 1e-15);
        assert!(encoding_layer::<f64>(&[], &cfg()).is_err());
    }

    proptest! {
        #[test]
        fn encoding_is_special_unitary(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) {
            let p = Point3::new(x, y, z);
            let u = encode_unitary(p, &cfg()).unwrap();
            prop_assert!((u.det() - Complex::new(1.0, 0.0)).norm() < 1e-12);
            prop_assert!(u.unitarity_residual() < 1e-12);
            let v = encode_unitary(p.scale(-1.0), &cfg()).unwrap();
            prop_assert!(v.max_abs_diff(&u.adjoint()) < 1e-12);
        }

        #[test]
        fn zyz_reconstructs(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0, squash in 0usize..4) {
            // squash pushes points towards the z axis or the origin
            let p = match squash {
                0 => Point3::new(x, y, z),
                1 => Point3::new(x * 1e-9, y * 1e-9, z),
                2 => Point3::new(x * 1e-13, y * 1e-13, z * 1e-13),
                _ => Point3::new(x, y * 1e-12, z),
            };
            let (a, b, g) = zyz_angles(p, &cfg()).unwrap();
            let u = encode_unitary(p, &cfg()).unwrap();
            prop_assert!(phase_aligned_residual(&u, &zyz_unitary(a, b, g)) < 1e-8);
        }
    }
}
