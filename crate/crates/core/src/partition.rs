//! Greedy split of an instance into a pseudorandom residual and structured
//! blocks that share a common zero set.
//!
//! Coordinate sets are visited in colex rank order. Whenever at least `m`
//! live vectors are zero on the current set, the `m` live vectors with the
//! smallest original indices are moved into a new block, and the count is
//! re-evaluated on what remains.

use crate::bits::{is_zero_on, CoordSet};
use crate::candidates::{build_candidate_lists, CandidateLists};
use crate::combinatorics::{Binomials, ColexSubsets};
use crate::error::{contract, Result};
use crate::instance::OVInstance;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Part {
    pub block: OVInstance,
    /// Original positions of the block's vectors, ascending.
    pub indices: Vec<usize>,
    pub zero_set: CoordSet,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PartitionResult {
    pub residual: OVInstance,
    pub residual_indices: Vec<usize>,
    pub parts: Vec<Part>,
}

/// Operation counters for one partition run.
#[derive(Clone, Copy, Default, PartialEq, Eq, Debug)]
pub struct PartitionStats {
    /// Coordinate sets visited.
    pub sets_scanned: u64,
    /// (vector, set) zero tests: pairs emitted while indexing plus liveness
    /// checks while scanning.
    pub zero_tests: u128,
    /// Vectors moved into blocks.
    pub moved: u64,
}

/// Everything the worst-case builder needs from one partition pass.
pub(crate) struct PartitionWork {
    pub result: PartitionResult,
    /// `Y_C` lists over the residual, renumbered to residual positions.
    pub residual_lists: CandidateLists,
    pub stats: PartitionStats,
    pub index_work: u128,
}

fn check_params(x: &OVInstance, m: usize, t: usize) -> Result<()> {
    if m == 0 || m > x.len() {
        return Err(contract(format!(
            "block size m = {m} must satisfy 1 <= m <= n = {}",
            x.len()
        )));
    }
    if t == 0 || t > x.dim() {
        return Err(contract(format!(
            "zero-set size t = {t} must satisfy 1 <= t <= d = {}",
            x.dim()
        )));
    }
    Ok(())
}

pub fn pseudorandom_partition(x: &OVInstance, m: usize, t: usize) -> Result<PartitionResult> {
    Ok(partition_with_stats(x, m, t)?.0)
}

pub fn partition_with_stats(
    x: &OVInstance,
    m: usize,
    t: usize,
) -> Result<(PartitionResult, PartitionStats)> {
    check_params(x, m, t)?;
    let binom = Binomials::new(x.dim(), t)?;
    let work = partition_indexed(x, m, t, &binom)?;
    Ok((work.result, work.stats))
}

pub(crate) fn partition_indexed(
    x: &OVInstance,
    m: usize,
    t: usize,
    binom: &Binomials,
) -> Result<PartitionWork> {
    let dim = x.dim();
    let n = x.len();
    let (lists, index_work) = build_candidate_lists(x, t, binom)?;
    let mut stats = PartitionStats {
        zero_tests: lists.total_entries() as u128,
        ..PartitionStats::default()
    };
    let mut alive = vec![true; n];
    let mut parts = Vec::new();
    let mut live: Vec<usize> = Vec::new();
    let mut zero_set = vec![0usize; t];
    for r in 0..lists.list_count() {
        stats.sets_scanned += 1;
        let list = lists.list(r as u64);
        stats.zero_tests += list.len() as u128;
        if list.len() < m {
            continue;
        }
        live.clear();
        live.extend(list.iter().map(|&i| i as usize).filter(|&i| alive[i]));
        if live.len() < m {
            continue;
        }
        binom.unrank_into(r as u64, &mut zero_set);
        for block in live.chunks_exact(m) {
            for &i in block {
                alive[i] = false;
            }
            stats.moved += m as u64;
            parts.push(Part {
                block: x.select(block),
                indices: block.to_vec(),
                zero_set: CoordSet::from_sorted_unchecked(dim, zero_set.clone()),
            });
        }
    }
    let residual_indices: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
    let residual = x.select(&residual_indices);
    let residual_lists = lists.retain_renumbered(&alive);
    Ok(PartitionWork {
        result: PartitionResult {
            residual,
            residual_indices,
            parts,
        },
        residual_lists,
        stats,
        index_work,
    })
}

/// Number of vectors zero on `c`, by direct per-coordinate test.
fn zero_count(x: &OVInstance, c: &CoordSet) -> usize {
    x.vectors()
        .filter(|v| is_zero_on(v, c).expect("dimensions agree"))
        .count()
}

fn for_each_set(d: usize, t: usize, mut f: impl FnMut(&CoordSet) -> bool) {
    let mut walk = ColexSubsets::new(d, t);
    while walk.advance() {
        let c = CoordSet::from_sorted_unchecked(d, walk.current().to_vec());
        if !f(&c) {
            return;
        }
    }
}

/// Brute-force check that no size-`t` coordinate set is zero on `m` or more
/// vectors. Cost `binom(d, t) * n * t`; meant for small `d`.
pub fn is_pseudorandom(x: &OVInstance, m: usize, t: usize) -> Result<bool> {
    if m == 0 || t > x.dim() {
        return Err(contract("is_pseudorandom needs m >= 1 and t <= d"));
    }
    let mut ok = true;
    for_each_set(x.dim(), t, |c| {
        ok = zero_count(x, c) < m;
        ok
    });
    Ok(ok)
}

/// Largest `|Y_C|` over all size-`t` coordinate sets, by brute force.
pub fn max_candidate_count(x: &OVInstance, t: usize) -> Result<usize> {
    if t > x.dim() {
        return Err(contract("max_candidate_count needs t <= d"));
    }
    let mut best = 0;
    for_each_set(x.dim(), t, |c| {
        best = best.max(zero_count(x, c));
        true
    });
    Ok(best)
}
