use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::io::{Read, Write};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex;

use super::{Sign, TwirledGenerator};
use crate::error::{Error, Result};
use crate::qcore::{DenseOperator, EigenDecomposition};
use crate::scalar::Scalar;

/// All generators `P_k^±`, `k = 2..=N`, for one pair count.
#[derive(Debug, Clone)]
pub struct GeneratorSet<T> {
    n_pairs: usize,
    gens: Vec<TwirledGenerator<T>>,
}

impl<T: Scalar> GeneratorSet<T> {
    pub fn build(n_pairs: usize) -> Result<Self> {
        if n_pairs < 2 {
            return Err(Error::TooSmall { what: "pair count", value: n_pairs, min: 2 });
        }
        let mut gens = Vec::with_capacity(2 * (n_pairs - 1));
        for k in 2..=n_pairs {
            for sign in Sign::BOTH {
                gens.push(TwirledGenerator::build(n_pairs, k, sign)?);
            }
        }
        Ok(GeneratorSet { n_pairs, gens })
    }

    /// Assembles a set from prebuilt generators, e.g. a perturbed one.
    pub fn from_generators(n_pairs: usize, gens: Vec<TwirledGenerator<T>>) -> Result<Self> {
        let mut set = GeneratorSet { n_pairs, gens: Vec::with_capacity(gens.len()) };
        for k in 2..=n_pairs {
            for sign in Sign::BOTH {
                let g = gens
                    .iter()
                    .find(|g| g.k() == k && g.sign() == sign && g.n_pairs() == n_pairs)
                    .ok_or(Error::MissingGenerator { k, sign })?;
                set.gens.push(g.clone());
            }
        }
        Ok(set)
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    pub fn get(&self, k: usize, sign: Sign) -> Result<&TwirledGenerator<T>> {
        if k < 2 || k > self.n_pairs {
            return Err(Error::MissingGenerator { k, sign });
        }
        self.gens.get((k - 2) * 2 + sign.index()).ok_or(Error::MissingGenerator { k, sign })
    }

    /// Generators in gate order: `k` ascending, `+` before `-`.
    pub fn iter(&self) -> impl Iterator<Item = &TwirledGenerator<T>> {
        self.gens.iter()
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }
}

/// Build-once map from pair count to its generator set. Lookups after the
/// first build only clone an `Arc`.
#[derive(Debug, Default)]
pub struct GeneratorCache<T> {
    sets: Mutex<HashMap<usize, Arc<GeneratorSet<T>>>>,
}

impl<T: Scalar> GeneratorCache<T> {
    pub fn new() -> Self {
        GeneratorCache { sets: Mutex::new(HashMap::new()) }
    }

    pub fn get(&self, n_pairs: usize) -> Result<Arc<GeneratorSet<T>>> {
        let mut sets = self.sets.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(set) = sets.get(&n_pairs) {
            return Ok(Arc::clone(set));
        }
        let set = Arc::new(GeneratorSet::build(n_pairs)?);
        sets.insert(n_pairs, Arc::clone(&set));
        Ok(set)
    }
}

/// Process-wide generator sets, one per (scalar type, pair count).
pub fn shared_generators<T: Scalar>(n_pairs: usize) -> Result<Arc<GeneratorSet<T>>> {
    type Entry = Arc<dyn Any + Send + Sync>;
    static CACHE: OnceLock<Mutex<HashMap<(TypeId, usize), Entry>>> = OnceLock::new();
    let mut sets = CACHE.get_or_init(Default::default).lock().unwrap_or_else(|e| e.into_inner());
    let key = (TypeId::of::<T>(), n_pairs);
    if let Some(set) = sets.get(&key) {
        return Ok(Arc::clone(set).downcast().expect("entry keyed by its type"));
    }
    let set = Arc::new(GeneratorSet::<T>::build(n_pairs)?);
    sets.insert(key, set.clone() as Entry);
    Ok(set)
}

/// Header of the on-disk eigendecomposition file.
///
/// Layout, all little-endian: four `u64` (`N`, `k`, sign with `+` = 0 and
/// `-` = 1, `dim`), then `dim` `f64` eigenvalues, then the `dim x dim`
/// eigenvector matrix row-major with real and imaginary parts interleaved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CacheHeader {
    pub n_pairs: usize,
    pub k: usize,
    pub sign: Sign,
    pub dim: usize,
}

pub fn write_eigen_cache<T: Scalar, W: Write>(gen: &TwirledGenerator<T>, out: &mut W) -> Result<()> {
    let mut w = std::io::BufWriter::new(out);
    for v in [gen.n_pairs(), gen.k(), gen.sign().index(), gen.dim()] {
        w.write_all(&(v as u64).to_le_bytes())?;
    }
    // eigenvalues go first on disk but come out of the same pass that
    // orders the eigenvector columns, so buffer the matrix body
    let mut body = Vec::with_capacity(gen.dim() * gen.dim() * 16);
    let eigvals = gen.for_each_eigvec_entry(|_, _, v| {
        body.extend_from_slice(&v.as_f64().to_le_bytes());
        body.extend_from_slice(&0f64.to_le_bytes());
        Ok(())
    })?;
    for v in eigvals {
        w.write_all(&v.as_f64().to_le_bytes())?;
    }
    w.write_all(&body)?;
    w.flush()?;
    Ok(())
}

pub fn read_eigen_cache<R: Read>(input: &mut R) -> Result<(CacheHeader, EigenDecomposition<f64>)> {
    let mut r = std::io::BufReader::new(input);
    let mut word = [0u8; 8];
    let mut next = |r: &mut std::io::BufReader<&mut R>, what: &str| -> Result<[u8; 8]> {
        r.read_exact(&mut word).map_err(|e| Error::CacheFormat(format!("{what}: {e}")))?;
        Ok(word)
    };
    let mut header = [0usize; 4];
    for (slot, name) in header.iter_mut().zip(["N", "k", "sign", "dim"]) {
        *slot = usize::try_from(u64::from_le_bytes(next(&mut r, name)?))
            .map_err(|_| Error::CacheFormat(format!("{name} does not fit in usize")))?;
    }
    let [n_pairs, k, sign, dim] = header;
    let sign = match sign {
        0 => Sign::Plus,
        1 => Sign::Minus,
        s => return Err(Error::CacheFormat(format!("sign tag {s} is not 0 or 1"))),
    };
    if n_pairs > 16 || dim != 1usize << (2 * n_pairs) {
        return Err(Error::CacheFormat(format!("dim {dim} does not match N = {n_pairs}")));
    }
    let mut eigvals = Vec::with_capacity(dim);
    for _ in 0..dim {
        eigvals.push(f64::from_le_bytes(next(&mut r, "eigenvalue")?));
    }
    let mut entries = Vec::with_capacity(dim * dim);
    for _ in 0..dim * dim {
        let re = f64::from_le_bytes(next(&mut r, "eigenvector")?);
        let im = f64::from_le_bytes(next(&mut r, "eigenvector")?);
        entries.push(Complex::new(re, im));
    }
    let eigvecs = DenseOperator::from_fn(dim, |row, col| entries[row * dim + col])?;
    Ok((CacheHeader { n_pairs, k, sign, dim }, EigenDecomposition { eigvals, eigvecs }))
}
