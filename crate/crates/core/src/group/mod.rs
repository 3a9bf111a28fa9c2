//! Pair-twirled generators `P_k^±` and the group-theoretic checks around
//! them: the pair-block permutation representation, the SU(2) -> SO(3)
//! covering map and the joint rotation/permutation invariant subspace.

mod cache;
mod generator;
mod rep;

use std::fmt;

pub use cache::{read_eigen_cache, shared_generators, write_eigen_cache, CacheHeader, GeneratorCache, GeneratorSet};
pub use generator::{pair_cycle_terms, PairCycleTerm, TwirledGenerator, DEFAULT_MAX_PAIRS};
pub use rep::{joint_invariant_dim, pair_permutation_rep, so3_to_su2, su2_to_so3, Rotation3, MAX_JOINT_INVARIANT_QUBITS};

/// Within-pair selection pattern: uniform (`+`) or parity-alternating (`-`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn index(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    /// `+1` or `-1`.
    pub fn factor(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}
