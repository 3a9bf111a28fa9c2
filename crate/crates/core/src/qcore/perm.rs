use crate::error::{Error, Result};

/// A bijection on `{0, .., n-1}`, stored as its image list: element `i` maps
/// to `image[i]`.
///
/// Acting on wires, the bit on wire `w` moves to wire `image[w]`, so that
/// `|x_0 .. x_{n-1}>` becomes `|x_{s^-1(0)} .. x_{s^-1(n-1)}>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WirePermutation {
    image: Vec<usize>,
}

impl WirePermutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &j in &image {
            if j >= n || seen[j] {
                return Err(Error::NotBijection { len: n });
            }
            seen[j] = true;
        }
        Ok(WirePermutation { image })
    }

    pub fn identity(n: usize) -> Self {
        WirePermutation { image: (0..n).collect() }
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        let mut image: Vec<usize> = (0..n).collect();
        if a >= n || b >= n {
            return Err(Error::NotBijection { len: n });
        }
        image.swap(a, b);
        Ok(WirePermutation { image })
    }

    /// The cycle `w_0 -> w_1 -> .. -> w_{k-1} -> w_0`, identity elsewhere.
    pub fn cycle(n: usize, wires: &[usize]) -> Result<Self> {
        let mut image: Vec<usize> = (0..n).collect();
        for (i, &w) in wires.iter().enumerate() {
            if w >= n {
                return Err(Error::NotBijection { len: n });
            }
            image[w] = wires[(i + 1) % wires.len()];
        }
        WirePermutation::new(image)
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.image.len()];
        for (i, &j) in self.image.iter().enumerate() {
            inv[j] = i;
        }
        WirePermutation { image: inv }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: other.len() });
        }
        Ok(WirePermutation { image: other.image.iter().map(|&j| self.image[j]).collect() })
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Remaps the bits of a computational-basis index. Wire 0 is the most
    /// significant bit of an `n`-bit index.
    #[inline]
    pub fn permute_index(&self, index: usize) -> usize {
        let n = self.image.len();
        let mut out = 0;
        for (w, &target) in self.image.iter().enumerate() {
            let bit = (index >> (n - 1 - w)) & 1;
            out |= bit << (n - 1 - target);
        }
        out
    }

    /// Every permutation of `n` elements in lexicographic order.
    pub fn all(n: usize) -> Vec<WirePermutation> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..n).collect();
        loop {
            out.push(WirePermutation { image: current.clone() });
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
            current.swap(i - 1, j);
            current[i..].reverse();
        }
        out
    }
}
