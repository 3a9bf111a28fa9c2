//! Dense complex linear algebra and statevector primitives.
//!
//! Everything here is a pure function of its inputs. Registers use the
//! big-endian wire convention: wire 0 is the most significant bit of a
//! computational-basis index.

mod eigen;
mod mat2;
mod operator;
mod perm;
mod state;

pub use eigen::{eig_hermitian, EigenDecomposition};
pub use mat2::Mat2;
pub use operator::{expectation, expm, DenseOperator};
pub use perm::WirePermutation;
pub use state::{Pauli, StateVector};
