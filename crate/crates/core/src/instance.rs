//! The preprocessing input: an ordered multiset of equal-dimension vectors.

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::bits::{gather_words, words_for, BitVec};
use crate::error::{check_dim, contract, Result};

/// `n` vectors of dimension `dim`, packed row-major.
///
/// Order matters: partition tie-breaking and candidate-list order follow it.
/// Duplicates are kept as distinct elements.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OVInstance {
    dim: usize,
    n: usize,
    stride: usize,
    words: Vec<u64>,
}

impl OVInstance {
    /// Rejects an empty vector list and mixed dimensions.
    pub fn new(dim: usize, vectors: &[BitVec]) -> Result<Self> {
        if vectors.is_empty() {
            return Err(contract("an instance needs at least one vector"));
        }
        let mut inst = Self::empty(dim);
        for v in vectors {
            inst.push(v)?;
        }
        Ok(inst)
    }

    /// Parse from `0`/`1` strings; handy in tests.
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let vectors = rows
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<BitVec>>>()?;
        let dim = vectors.first().map_or(0, BitVec::dim);
        Self::new(dim, &vectors)
    }

    /// An instance with no vectors (used for empty residuals).
    pub fn empty(dim: usize) -> Self {
        OVInstance {
            dim,
            n: 0,
            stride: words_for(dim),
            words: Vec::new(),
        }
    }

    pub(crate) fn from_packed(dim: usize, n: usize, words: Vec<u64>) -> Self {
        let stride = words_for(dim);
        debug_assert_eq!(words.len(), n * stride);
        OVInstance {
            dim,
            n,
            stride,
            words,
        }
    }

    pub fn push(&mut self, v: &BitVec) -> Result<()> {
        check_dim(self.dim, v.dim())?;
        self.words.extend_from_slice(v.words());
        self.n += 1;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub(crate) fn packed(&self) -> &[u64] {
        &self.words
    }

    /// Packed words of vector `i`.
    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.words[i * self.stride..(i + 1) * self.stride]
    }

    pub fn vector(&self, i: usize) -> BitVec {
        BitVec::from_words(self.dim, self.row(i).to_vec()).expect("rows keep the tail clear")
    }

    pub fn vectors(&self) -> impl Iterator<Item = BitVec> + '_ {
        (0..self.n).map(|i| self.vector(i))
    }

    /// The vectors at `indices` (in that order), read at coordinates `keep`.
    pub(crate) fn gather(&self, indices: &[usize], keep: &[usize]) -> OVInstance {
        let stride = words_for(keep.len());
        let mut words = vec![0u64; indices.len() * stride];
        for (out, &i) in words.chunks_mut(stride.max(1)).zip(indices) {
            gather_words(self.row(i), keep, &mut out[..stride]);
        }
        if stride == 0 {
            words.clear();
        }
        OVInstance::from_packed(keep.len(), indices.len(), words)
    }

    /// The vectors at `indices`, all coordinates kept.
    pub(crate) fn select(&self, indices: &[usize]) -> OVInstance {
        let mut words = Vec::with_capacity(indices.len() * self.stride);
        for &i in indices {
            words.extend_from_slice(self.row(i));
        }
        OVInstance::from_packed(self.dim, indices.len(), words)
    }
}

/// Draw `n` vectors from the p-biased distribution: each coordinate is zero
/// independently with probability `p`.
///
/// The generator is SplitMix64 seeded with `seed`. Coordinates are drawn
/// vector by vector, coordinate 0 first, one 64-bit output each; a coordinate
/// is zero iff the output is below `p * 2^64` (always zero when `p == 1`).
pub fn sample_instance(n: usize, d: usize, p: f64, seed: u64) -> Result<OVInstance> {
    if n == 0 || d == 0 {
        return Err(contract("sample_instance needs n >= 1 and d >= 1"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(contract(format!("zero probability {p} outside [0, 1]")));
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut inst = OVInstance::empty(d);
    let mut v = BitVec::zeros(d);
    for _ in 0..n {
        for j in 0..d {
            v.set(j, !draw_zero(&mut rng, p));
        }
        inst.push(&v)?;
    }
    Ok(inst)
}

#[inline]
pub(crate) fn draw_zero(rng: &mut SplitMix64, p: f64) -> bool {
    let u = rng.next_u64();
    if p >= 1.0 {
        return true;
    }
    // Saturating float-to-int cast; exact for p in [0, 1).
    let threshold = (p * 18_446_744_073_709_551_616.0) as u64;
    u < threshold
}
