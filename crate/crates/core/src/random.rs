//! Haar-random group elements and states.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::encoder::Point3;
use crate::group::{su2_to_so3, Rotation3};
use crate::qcore::{Mat2, StateVector};
use crate::scalar::Scalar;

fn gaussian<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::of(rng.sample::<f64, _>(StandardNormal))
}

/// Haar-uniform element of SU(2): a normalised 4-component Gaussian read as
/// a unit quaternion.
pub fn random_su2<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> Mat2<T> {
    loop {
        let q: [T; 4] = std::array::from_fn(|_| gaussian(rng));
        let n = q.iter().map(|&x| x * x).sum::<T>().sqrt();
        if n > T::of(1e-6) {
            return Mat2::from_quaternion(q.map(|x| x / n));
        }
    }
}

/// Haar-uniform rotation together with one of its SU(2) lifts.
pub fn random_rotation<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> (Rotation3<T>, Mat2<T>) {
    let u = random_su2(rng);
    let r = su2_to_so3(&u).expect("quaternion matrices are special unitary");
    (r, u)
}

pub fn rotate<T: Scalar>(r: &Rotation3<T>, p: Point3<T>) -> Point3<T> {
    let v = [p.x, p.y, p.z];
    let row = |i: usize| r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2];
    Point3::new(row(0), row(1), row(2))
}

/// Uniformly random unit vector on `n_qubits` qubits.
pub fn random_state<T: Scalar, R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> StateVector<T> {
    let amps = (0..1usize << n_qubits).map(|_| Complex::new(gaussian(rng), gaussian(rng))).collect();
    StateVector::from_amplitudes(amps).expect("power-of-two length").normalized()
}

/// Uniformly random permutation of `0..n`.
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_are_group_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let (r, u) = random_rotation::<f64, _>(&mut rng);
            u.check_special_unitary().unwrap();
            let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
                + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
            assert!((det - 1.0).abs() < 1e-12);
        }
        let psi = random_state::<f64, _>(4, &mut rng);
        assert!((psi.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rotation_preserves_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (r, _) = random_rotation::<f64, _>(&mut rng);
        let p = Point3::new(0.3, -0.4, 1.2);
        let q = rotate(&r, p);
        assert!((q.norm() - p.norm()).abs() < 1e-14);
    }
}
