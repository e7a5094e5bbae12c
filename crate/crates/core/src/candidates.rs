//! Building blocks shared by the average-case and worst-case structures: the
//! bitmap of answers for sparse queries, and the candidate lists `Y_C` keyed by
//! the colex rank of a size-`t` coordinate set.

use crate::bits::{iter_ones, words_for, WORD_BITS};
use crate::combinatorics::{Binomials, ColexSubsets};
use crate::error::{Error, Result};
use crate::instance::OVInstance;
use crate::oracle::{closure_cost, orthogonality_closure, scan_words, DENSE_DIM_CAP};

/// One bit per query of weight `< t`, indexed by sparse rank.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SparseBitmap {
    pub(crate) len: u64,
    pub(crate) bits: Vec<u64>,
}

impl SparseBitmap {
    pub(crate) fn from_bits(len: u64, bits: Vec<u64>) -> Result<Self> {
        if bits.len() as u64 != len.div_ceil(WORD_BITS as u64) {
            return Err(Error::Format(format!(
                "sparse bitmap of {len} bits stored in {} words",
                bits.len()
            )));
        }
        Ok(SparseBitmap { len, bits })
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, rank: u64) -> bool {
        debug_assert!(rank < self.len);
        (self.bits[(rank / 64) as usize] >> (rank % 64)) & 1 == 1
    }

    fn set(&mut self, rank: u64) {
        self.bits[(rank / 64) as usize] |= 1 << (rank % 64);
    }
}

/// Build the sparse-query bitmap, choosing between a direct scan per query and
/// the dense superset closure, whichever is cheaper. Returns the bitmap and
/// the work performed.
pub(crate) fn build_sparse_bitmap(
    x: &OVInstance,
    t: usize,
    binom: &Binomials,
) -> Result<(SparseBitmap, u128)> {
    let dim = x.dim();
    let len = binom.count_below(t);
    let len_words = usize::try_from(len.div_ceil(64))
        .map_err(|_| Error::Refused(format!("sparse bitmap of {len} bits")))?;
    let mut bitmap = SparseBitmap {
        len,
        bits: vec![0; len_words],
    };
    let direct_cost = len as u128 * x.len().max(1) as u128;
    if dim <= DENSE_DIM_CAP && closure_cost(dim, x.len()) < direct_cost {
        let dense = orthogonality_closure(x)?;
        let mut rank = 0u64;
        for w in 0..t.min(dim + 1) {
            // Increasing integer order within a weight class is colex order.
            let mut mask: u64 = if w == 0 { 0 } else { (1u64 << w) - 1 };
            let limit = 1u64 << dim;
            while mask < limit {
                if dense.lookup_index(mask) {
                    bitmap.set(rank);
                }
                rank += 1;
                if w == 0 {
                    break;
                }
                let c = mask & mask.wrapping_neg();
                let r = mask + c;
                mask = (((r ^ mask) >> 2) / c) | r;
            }
        }
        debug_assert_eq!(rank, len);
        Ok((bitmap, closure_cost(dim, x.len()) + len as u128))
    } else {
        let mut q = vec![0u64; words_for(dim)];
        let mut rank = 0u64;
        for w in 0..t.min(dim + 1) {
            let mut walk = ColexSubsets::new(dim, w);
            while walk.advance() {
                q.iter_mut().for_each(|word| *word = 0);
                for &j in walk.current() {
                    q[j / WORD_BITS] |= 1 << (j % WORD_BITS);
                }
                if scan_words(x, &q) {
                    bitmap.set(rank);
                }
                rank += 1;
            }
        }
        debug_assert_eq!(rank, len);
        Ok((bitmap, direct_cost))
    }
}

/// Candidate lists in compressed-row form: list `r` is
/// `entries[offsets[r]..offsets[r + 1]]`, each entry a vector index in
/// ascending order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CandidateLists {
    pub(crate) offsets: Vec<u32>,
    pub(crate) entries: Vec<u32>,
}

impl CandidateLists {
    pub(crate) fn from_parts(offsets: Vec<u32>, entries: Vec<u32>) -> Result<Self> {
        let ok = !offsets.is_empty()
            && offsets[0] == 0
            && offsets.windows(2).all(|w| w[0] <= w[1])
            && *offsets.last().unwrap() as usize == entries.len();
        if !ok {
            return Err(Error::Format("malformed candidate list offsets".into()));
        }
        Ok(CandidateLists { offsets, entries })
    }

    pub fn list_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn list(&self, rank: u64) -> &[u32] {
        let r = rank as usize;
        &self.entries[self.offsets[r] as usize..self.offsets[r + 1] as usize]
    }

    pub fn total_entries(&self) -> usize {
        self.entries.len()
    }

    pub fn max_len(&self) -> usize {
        self.offsets
            .windows(2)
            .map(|w| (w[1] - w[0]) as usize)
            .max()
            .unwrap_or(0)
    }

    /// Keep only entries with `keep[idx]`, renumbering survivors to their
    /// position among kept vectors.
    pub(crate) fn retain_renumbered(&self, keep: &[bool]) -> CandidateLists {
        let mut new_index = vec![u32::MAX; keep.len()];
        let mut next = 0u32;
        for (i, &k) in keep.iter().enumerate() {
            if k {
                new_index[i] = next;
                next += 1;
            }
        }
        let mut offsets = Vec::with_capacity(self.offsets.len());
        let mut entries = Vec::new();
        offsets.push(0);
        for r in 0..self.list_count() {
            entries.extend(
                self.list(r as u64)
                    .iter()
                    .filter(|&&i| keep[i as usize])
                    .map(|&i| new_index[i as usize]),
            );
            offsets.push(entries.len() as u32);
        }
        CandidateLists { offsets, entries }
    }
}

/// Calls `f(rank)` for every size-`t` subset of the zero coordinates of `row`.
#[inline]
fn for_each_zero_subset(
    row: &[u64],
    dim: usize,
    t: usize,
    binom: &Binomials,
    zeros: &mut Vec<usize>,
    mut f: impl FnMut(u64),
) {
    zeros.clear();
    let mut ones = iter_ones(row).peekable();
    for j in 0..dim {
        if ones.peek() == Some(&j) {
            ones.next();
        } else {
            zeros.push(j);
        }
    }
    if zeros.len() < t {
        return;
    }
    let mut walk = ColexSubsets::new(zeros.len(), t);
    while walk.advance() {
        let rank = walk
            .current()
            .iter()
            .enumerate()
            .map(|(j, &p)| binom.get(zeros[p], j + 1))
            .sum();
        f(rank);
    }
}

/// `Y_C = { i : x_i is zero on C }` for every `C` of size `t`, by enumerating
/// the size-`t` subsets of each vector's zero set. Returns the lists and the
/// number of (vector, set) pairs emitted.
pub(crate) fn build_candidate_lists(
    x: &OVInstance,
    t: usize,
    binom: &Binomials,
) -> Result<(CandidateLists, u128)> {
    let dim = x.dim();
    let sets = binom.get(dim, t);
    let sets = usize::try_from(sets)
        .ok()
        .filter(|&s| s < u32::MAX as usize)
        .ok_or_else(|| Error::Refused(format!("{sets} candidate lists is too many")))?;
    if x.len() >= u32::MAX as usize {
        return Err(Error::Refused(
            "too many vectors for 32-bit candidate indices".into(),
        ));
    }
    let mut counts = vec![0u32; sets + 1];
    let mut zeros = Vec::with_capacity(dim);
    let mut total: u64 = 0;
    for i in 0..x.len() {
        for_each_zero_subset(x.row(i), dim, t, binom, &mut zeros, |r| {
            counts[r as usize + 1] += 1;
            total += 1;
        });
    }
    if total >= u32::MAX as u64 {
        return Err(Error::Refused(format!(
            "{total} candidate entries exceed the 32-bit table limit"
        )));
    }
    for r in 0..sets {
        counts[r + 1] += counts[r];
    }
    let offsets = counts;
    let mut cursor: Vec<u32> = offsets[..sets].to_vec();
    let mut entries = vec![0u32; total as usize];
    for i in 0..x.len() {
        for_each_zero_subset(x.row(i), dim, t, binom, &mut zeros, |r| {
            let slot = &mut cursor[r as usize];
            entries[*slot as usize] = i as u32;
            *slot += 1;
        });
    }
    let work = 2 * total as u128 * t.max(1) as u128 + 2 * (x.len() * dim) as u128;
    Ok((CandidateLists { offsets, entries }, work))
}
