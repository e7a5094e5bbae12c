//! Combinatorial number system in colexicographic order.
//!
//! A size-`t` subset `c_0 < c_1 < ... < c_{t-1}` of `[0, d)` has rank
//! `sum_j binom(c_j, j + 1)`, a bijection onto `[0, binom(d, t))` that does not
//! depend on `d`. Sparse queries (weight below `t`) are ranked by weight block
//! first, then by the colex rank of their support inside the block.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::bits::{iter_ones, BitVec, CoordSet};
use crate::error::{contract, Error, Result};

/// Index into a colex enumeration of subsets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubsetRank(pub u64);

/// Exact binomial table `binom(n, k)` for `n <= max_n`, `k <= max_k`.
///
/// Construction fails if any entry (or any cumulative sum used for sparse
/// ranking) does not fit in a `u64`.
#[derive(Clone, Debug)]
pub struct Binomials {
    max_n: usize,
    max_k: usize,
    /// Row-major, `(max_n + 1) x (max_k + 1)`.
    table: Vec<u64>,
    /// `leq[w] = sum_{u < w} binom(max_n, u)` for `w <= max_k + 1`.
    below: Vec<u64>,
}

impl Binomials {
    pub fn new(max_n: usize, max_k: usize) -> Result<Self> {
        let cols = max_k + 1;
        let mut table = vec![0u64; (max_n + 1) * cols];
        for n in 0..=max_n {
            table[n * cols] = 1;
            for k in 1..=max_k.min(n) {
                let above = table[(n - 1) * cols + k - 1];
                let left = if k < n { table[(n - 1) * cols + k] } else { 0 };
                table[n * cols + k] = above.checked_add(left).ok_or_else(|| {
                    Error::Overflow(format!("binom({n}, {k}) does not fit in 64 bits"))
                })?;
            }
        }
        let mut below = Vec::with_capacity(cols + 1);
        let mut acc = 0u64;
        below.push(0);
        for k in 0..cols {
            acc = acc
                .checked_add(table[max_n * cols + k])
                .ok_or_else(|| Error::Overflow(format!("binom({max_n}, <= {k}) overflows")))?;
            below.push(acc);
        }
        Ok(Binomials {
            max_n,
            max_k,
            table,
            below,
        })
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    pub fn max_k(&self) -> usize {
        self.max_k
    }

    #[inline]
    pub fn get(&self, n: usize, k: usize) -> u64 {
        if k > n {
            return 0;
        }
        debug_assert!(n <= self.max_n && k <= self.max_k);
        self.table[n * (self.max_k + 1) + k]
    }

    /// `sum_{w < k} binom(max_n, w)`.
    #[inline]
    pub fn count_below(&self, k: usize) -> u64 {
        self.below[k]
    }

    /// Colex rank of a strictly increasing index list.
    #[inline]
    pub fn rank_members(&self, members: &[usize]) -> u64 {
        members
            .iter()
            .enumerate()
            .map(|(j, &c)| self.get(c, j + 1))
            .sum()
    }

    /// Colex rank of the first `t` set bits of `words`, or `None` when fewer
    /// than `t` bits are set.
    #[inline]
    pub fn rank_lowest_ones(&self, words: &[u64], t: usize) -> Option<u64> {
        let mut rank = 0u64;
        let mut taken = 0;
        for c in iter_ones(words) {
            if taken == t {
                break;
            }
            taken += 1;
            rank += self.get(c, taken);
        }
        (taken == t).then_some(rank)
    }

    /// Rank of a sparse vector among all vectors of weight `< max_k + 1`
    /// over `max_n` coordinates.
    #[inline]
    pub fn rank_sparse_words(&self, words: &[u64], weight: usize) -> u64 {
        let mut rank = self.count_below(weight);
        for (j, c) in iter_ones(words).enumerate() {
            rank += self.get(c, j + 1);
        }
        rank
    }

    /// Writes the size-`out.len()` subset with colex rank `rank` into `out`.
    pub fn unrank_into(&self, mut rank: u64, out: &mut [usize]) {
        let mut c = self.max_n;
        for j in (1..=out.len()).rev() {
            // Largest c with binom(c, j) <= rank; c >= j - 1 always qualifies.
            c -= 1;
            while self.get(c, j) > rank {
                c -= 1;
            }
            out[j - 1] = c;
            rank -= self.get(c, j);
        }
    }
}

/// Walks the size-`t` subsets of `[0, d)` in colex order.
#[derive(Clone, Debug)]
pub struct ColexSubsets {
    d: usize,
    items: Vec<usize>,
    started: bool,
    done: bool,
}

impl ColexSubsets {
    pub fn new(d: usize, t: usize) -> Self {
        ColexSubsets {
            d,
            items: (0..t).collect(),
            started: false,
            done: t > d,
        }
    }

    /// Advance to the next subset; returns `false` once exhausted.
    pub fn advance(&mut self) -> bool {
        if self.done {
            return false;
        }
        if !self.started {
            self.started = true;
            return true;
        }
        let t = self.items.len();
        for j in 0..t {
            let limit = if j + 1 < t { self.items[j + 1] } else { self.d };
            if self.items[j] + 1 < limit {
                self.items[j] += 1;
                for (r, item) in self.items[..j].iter_mut().enumerate() {
                    *item = r;
                }
                return true;
            }
        }
        self.done = true;
        false
    }

    pub fn current(&self) -> &[usize] {
        &self.items
    }
}

pub fn binom_big(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc *= n - j;
        acc /= j + 1;
    }
    acc
}

/// `sum_{w=0}^{t} binom(d, w)`, exact.
pub fn binom_leq(d: usize, t: usize) -> BigUint {
    let mut acc = BigUint::zero();
    let mut term = BigUint::one();
    for w in 0..=t.min(d) {
        acc += &term;
        term *= d - w;
        term /= w + 1;
    }
    acc
}

pub fn rank_subset(c: &CoordSet, t: usize) -> Result<SubsetRank> {
    if c.len() != t {
        return Err(contract(format!(
            "rank_subset expects {t} members, got {}",
            c.len()
        )));
    }
    let table = Binomials::new(c.dim(), t)?;
    Ok(SubsetRank(table.rank_members(c.members())))
}

pub fn unrank_subset(r: SubsetRank, d: usize, t: usize) -> Result<CoordSet> {
    if t > d {
        return Err(contract(format!("subset size {t} exceeds dimension {d}")));
    }
    let table = Binomials::new(d, t)?;
    let total = table.get(d, t);
    if r.0 >= total {
        return Err(contract(format!(
            "rank {} out of range [0, binom({d}, {t}) = {total})",
            r.0
        )));
    }
    let mut members = vec![0; t];
    table.unrank_into(r.0, &mut members);
    Ok(CoordSet::from_sorted_unchecked(d, members))
}

pub fn rank_sparse_query(q: &BitVec, t: usize) -> Result<SubsetRank> {
    let w = q.popcount();
    if w >= t {
        return Err(contract(format!(
            "query weight {w} is not below the sparsity threshold {t}"
        )));
    }
    let table = Binomials::new(q.dim(), t - 1)?;
    Ok(SubsetRank(table.rank_sparse_words(q.words(), w)))
}
