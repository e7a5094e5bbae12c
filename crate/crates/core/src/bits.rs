//! Bit-packed vectors and coordinate sets.
//!
//! Coordinate `j` of a [`BitVec`] lives in word `j / 64`, bit `j % 64`. Bits
//! past `dim` in the last word are always zero, so word-wise comparisons and
//! popcounts never need masking.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_dim, contract, Error, Result};

pub(crate) const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(dim: usize) -> usize {
    dim.div_ceil(WORD_BITS)
}

/// True iff the two packed slices share no set bit.
#[inline]
pub fn words_orthogonal(a: &[u64], b: &[u64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).all(|(x, y)| x & y == 0)
}

#[inline]
pub(crate) fn word_get(words: &[u64], j: usize) -> bool {
    (words[j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
}

#[inline]
pub(crate) fn word_set(words: &mut [u64], j: usize) {
    words[j / WORD_BITS] |= 1u64 << (j % WORD_BITS);
}

/// Gather the coordinates listed in `keep` into a fresh packed buffer.
pub(crate) fn gather_words(src: &[u64], keep: &[usize], out: &mut [u64]) {
    out.iter_mut().for_each(|w| *w = 0);
    for (dst, &j) in keep.iter().enumerate() {
        if word_get(src, j) {
            word_set(out, dst);
        }
    }
}

/// Indices of set bits, ascending.
pub(crate) fn iter_ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut rest = w;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD_BITS + b)
            }
        })
    })
}

/// A vector in `{0,1}^dim`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    dim: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(dim: usize) -> Self {
        BitVec {
            dim,
            words: vec![0; words_for(dim)],
        }
    }

    pub fn ones(dim: usize) -> Self {
        let mut v = Self::zeros(dim);
        for j in 0..dim {
            v.set(j, true);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (j, &b) in bits.iter().enumerate() {
            v.set(j, b);
        }
        v
    }

    /// Build from packed words; stray bits past `dim` are rejected.
    pub fn from_words(dim: usize, words: Vec<u64>) -> Result<Self> {
        if words.len() != words_for(dim) {
            return Err(Error::Format(format!(
                "{} words cannot hold a vector of dimension {dim}",
                words.len()
            )));
        }
        if !dim.is_multiple_of(WORD_BITS) {
            if let Some(&last) = words.last() {
                if last >> (dim % WORD_BITS) != 0 {
                    return Err(Error::Format("bits set past the vector dimension".into()));
                }
            }
        }
        Ok(BitVec { dim, words })
    }

    /// The vector whose coordinate `j` is bit `j` of `index` (requires `dim <= 64`).
    pub fn from_index(dim: usize, index: u64) -> Self {
        assert!(dim <= WORD_BITS, "from_index needs dim <= 64");
        let mut v = Self::zeros(dim);
        if dim > 0 {
            let mask = if dim == WORD_BITS {
                u64::MAX
            } else {
                (1u64 << dim) - 1
            };
            v.words[0] = index & mask;
        }
        v
    }

    /// Integer whose bit `j` is coordinate `j` (requires `dim <= 64`).
    pub fn to_index(&self) -> u64 {
        assert!(self.dim <= WORD_BITS, "to_index needs dim <= 64");
        self.words.first().copied().unwrap_or(0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, j: usize) -> bool {
        assert!(
            j < self.dim,
            "coordinate {j} out of range for dim {}",
            self.dim
        );
        word_get(&self.words, j)
    }

    pub fn set(&mut self, j: usize, bit: bool) {
        assert!(
            j < self.dim,
            "coordinate {j} out of range for dim {}",
            self.dim
        );
        let mask = 1u64 << (j % WORD_BITS);
        if bit {
            self.words[j / WORD_BITS] |= mask;
        } else {
            self.words[j / WORD_BITS] &= !mask;
        }
    }

    pub fn popcount(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Set coordinates in ascending order.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        iter_ones(&self.words)
    }

    pub fn complement(&self) -> BitVec {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        out.clear_tail();
        out
    }

    fn clear_tail(&mut self) {
        let rem = self.dim % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.dim {
            f.write_str(if word_get(&self.words, j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl FromStr for BitVec {
    type Err = Error;

    /// Parses a string of `0`/`1`; character `j` is coordinate `j`.
    fn from_str(s: &str) -> Result<Self> {
        let mut v = BitVec::zeros(s.len());
        for (j, c) in s.bytes().enumerate() {
            match c {
                b'0' => {}
                b'1' => v.set(j, true),
                other => {
                    return Err(Error::Format(format!(
                        "unexpected character {:?} at column {}",
                        other as char,
                        j + 1
                    )))
                }
            }
        }
        Ok(v)
    }
}

/// A subset of `[0, dim)`, stored as a strictly increasing index list.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CoordSet {
    dim: usize,
    members: Vec<usize>,
}

impl CoordSet {
    pub fn new(dim: usize, members: Vec<usize>) -> Result<Self> {
        if members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(contract(
                "coordinate set members must be strictly increasing",
            ));
        }
        if let Some(&last) = members.last() {
            if last >= dim {
                return Err(contract(format!(
                    "coordinate {last} out of range for dimension {dim}"
                )));
            }
        }
        Ok(CoordSet { dim, members })
    }

    /// Sorts and deduplicates before validating.
    pub fn from_unsorted(dim: usize, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        Self::new(dim, members)
    }

    pub(crate) fn from_sorted_unchecked(dim: usize, members: Vec<usize>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(members.last().is_none_or(|&m| m < dim));
        CoordSet { dim, members }
    }

    pub fn empty(dim: usize) -> Self {
        CoordSet {
            dim,
            members: Vec::new(),
        }
    }

    pub fn full(dim: usize) -> Self {
        CoordSet {
            dim,
            members: (0..dim).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.members.binary_search(&j).is_ok()
    }

    pub fn complement(&self) -> CoordSet {
        let mut out = Vec::with_capacity(self.dim - self.members.len());
        let mut it = self.members.iter().peekable();
        for j in 0..self.dim {
            if it.peek() == Some(&&j) {
                it.next();
            } else {
                out.push(j);
            }
        }
        CoordSet {
            dim: self.dim,
            members: out,
        }
    }

    /// The indicator vector of the set.
    pub fn indicator(&self) -> BitVec {
        let mut v = BitVec::zeros(self.dim);
        for &j in &self.members {
            v.set(j, true);
        }
        v
    }

    /// The set of coordinates where `v` is one.
    pub fn support_of(v: &BitVec) -> CoordSet {
        CoordSet {
            dim: v.dim(),
            members: v.support().collect(),
        }
    }
}

/// True iff `x` and `q` share no set coordinate.
pub fn is_orthogonal(x: &BitVec, q: &BitVec) -> Result<bool> {
    check_dim(x.dim(), q.dim())?;
    Ok(words_orthogonal(x.words(), q.words()))
}

/// The vector `v` read only at the coordinates of `c`, in order.
pub fn restrict(v: &BitVec, c: &CoordSet) -> Result<BitVec> {
    check_dim(v.dim(), c.dim())?;
    let mut out = BitVec::zeros(c.len());
    gather_words(v.words(), c.members(), &mut out.words);
    Ok(out)
}

/// True iff `v` is zero on every coordinate of `c`.
pub fn is_zero_on(v: &BitVec, c: &CoordSet) -> Result<bool> {
    check_dim(v.dim(), c.dim())?;
    Ok(c.members().iter().all(|&j| !word_get(v.words(), j)))
}
