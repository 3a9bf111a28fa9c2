//! Exact statevector simulation of a hybrid quantum-classical point-cloud
//! classifier whose logits are invariant under 3D rotations and point
//! permutations.
//!
//! Each of the `N` input points is encoded as an SU(2) rotation on one
//! qubit of a Bell singlet pair. The `2N`-qubit register is then evolved by
//! blocks of pair-twirled generators, which commute with both the global
//! SU(2) action and permutations of whole pairs. Pairwise Heisenberg
//! expectations are read out and fed to a Set-MLP head.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common double precision instantiations.

pub mod circuit;
pub mod encoder;
pub mod error;
pub mod grad;
pub mod group;
pub mod head;
pub mod model;
pub mod qcore;
pub mod random;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type StateVectorF64 = qcore::StateVector<f64>;
pub type StateVectorF32 = qcore::StateVector<f32>;
pub type Mat2F64 = qcore::Mat2<f64>;
pub type DenseOperatorF64 = qcore::DenseOperator<f64>;
pub type TwirledGeneratorF64 = group::TwirledGenerator<f64>;
pub type TwirledGeneratorF32 = group::TwirledGenerator<f32>;
pub type Point3F64 = encoder::Point3<f64>;
pub type CircuitParamsF64 = circuit::CircuitParams<f64>;
pub type CircuitParamsF32 = circuit::CircuitParams<f32>;
pub type FeatureMatrixF64 = circuit::FeatureMatrix<f64>;
pub type HeadParamsF64 = head::HeadParams<f64>;
pub type HybridModelF64 = model::HybridModel<f64>;
pub type HybridModelF32 = model::HybridModel<f32>;
