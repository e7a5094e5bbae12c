//! Average-case structure: answers for every sparse query, plus for every
//! size-`t` coordinate set `C` the list of input vectors that vanish on `C`.
//!
//! A query of weight at least `t` picks `C` as its lowest `t` set coordinates.
//! Any vector orthogonal to the query must vanish on `C`, so scanning `Y_C` is
//! enough. On p-biased inputs these lists are short with high probability.

use crate::bits::{words_orthogonal, BitVec};
use crate::candidates::{build_candidate_lists, build_sparse_bitmap, CandidateLists, SparseBitmap};
use crate::combinatorics::Binomials;
use crate::engine::QueryStats;
use crate::error::{check_dim, contract, Error, Result};
use crate::instance::OVInstance;

/// Tolerance for treating a logarithm as an exact integer before `ceil`.
const LOG_SNAP: f64 = 1e-9;

/// `ceil(log_{1/p}(6 n^eps))`, at least 1. The caller clamps to `d`.
pub fn choose_t_avg(n: u64, p: f64, eps: f64) -> Result<usize> {
    if n == 0 {
        return Err(contract("choose_t_avg needs n >= 1"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(contract(format!("eps = {eps} outside (0, 1)")));
    }
    threshold_for_target(6.0 * (n as f64).powf(eps), p)
}

/// `ceil(log_{1/p}(target))`, at least 1.
pub fn threshold_for_target(target: f64, p: f64) -> Result<usize> {
    if !(p > 0.0 && p < 1.0) {
        return Err(contract(format!("p = {p} outside (0, 1)")));
    }
    let exact = target.ln() / (1.0 / p).ln();
    let rounded = exact.round();
    let t = if (exact - rounded).abs() < LOG_SNAP {
        rounded
    } else {
        exact.ceil()
    };
    Ok((t as usize).max(1))
}

#[derive(Clone, Debug)]
pub struct AvgStructure {
    pub(crate) t: usize,
    pub(crate) vectors: OVInstance,
    pub(crate) sparse: SparseBitmap,
    pub(crate) lists: CandidateLists,
    pub(crate) binom: Binomials,
    pub(crate) build_work: u128,
}

pub fn avg_build(x: &OVInstance, t: usize) -> Result<AvgStructure> {
    if x.is_empty() {
        return Err(contract("cannot build over an empty instance"));
    }
    let d = x.dim();
    if t == 0 {
        return Err(contract("sparsity threshold t must be at least 1"));
    }
    if t > d {
        return Err(contract(format!(
            "sparsity threshold t = {t} exceeds the dimension d = {d}; \
             use the full-bitmap oracle for this instance instead"
        )));
    }
    let binom = Binomials::new(d, t)?;
    let (sparse, sparse_work) = build_sparse_bitmap(x, t, &binom)?;
    let (lists, list_work) = build_candidate_lists(x, t, &binom)?;
    Ok(AvgStructure {
        t,
        vectors: x.clone(),
        sparse,
        lists,
        binom,
        build_work: sparse_work + list_work,
    })
}

impl AvgStructure {
    pub(crate) fn from_parts(
        t: usize,
        vectors: OVInstance,
        sparse: SparseBitmap,
        lists: CandidateLists,
    ) -> Result<Self> {
        let d = vectors.dim();
        if t == 0 || t > d {
            return Err(Error::Format(format!(
                "threshold {t} invalid for dimension {d}"
            )));
        }
        let binom = Binomials::new(d, t)?;
        if sparse.len() != binom.count_below(t) || lists.list_count() as u64 != binom.get(d, t) {
            return Err(Error::Format("table sizes disagree with (d, t)".into()));
        }
        if lists.entries.iter().any(|&e| e as usize >= vectors.len()) {
            return Err(Error::Format(
                "candidate index past the stored vectors".into(),
            ));
        }
        Ok(AvgStructure {
            t,
            vectors,
            sparse,
            lists,
            binom,
            build_work: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.vectors.dim()
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn sparse_bitmap(&self) -> &SparseBitmap {
        &self.sparse
    }

    pub fn lists(&self) -> &CandidateLists {
        &self.lists
    }

    pub fn instance(&self) -> &OVInstance {
        &self.vectors
    }

    /// Candidate vectors (as instance indices) for the set with colex rank `rank`.
    pub fn candidates(&self, rank: u64) -> &[u32] {
        self.lists.list(rank)
    }

    /// Bits charged by the analysis: one per sparse query plus `d` per stored
    /// candidate entry.
    pub fn accounted_bits(&self) -> u128 {
        self.sparse.len() as u128 + self.dim() as u128 * self.lists.total_entries() as u128
    }

    pub fn build_work(&self) -> u128 {
        self.build_work
    }

    pub fn query(&self, q: &BitVec) -> Result<bool> {
        let mut stats = QueryStats::default();
        self.query_with_stats(q, &mut stats)
    }

    pub fn query_with_stats(&self, q: &BitVec, stats: &mut QueryStats) -> Result<bool> {
        check_dim(self.dim(), q.dim())?;
        stats.nodes_visited += 1;
        let w = q.popcount();
        if w < self.t {
            stats.bitmap_lookups += 1;
            return Ok(self.sparse.get(self.binom.rank_sparse_words(q.words(), w)));
        }
        let rank = self
            .binom
            .rank_lowest_ones(q.words(), self.t)
            .expect("weight is at least t");
        for &idx in self.lists.list(rank) {
            stats.candidate_checks += 1;
            if words_orthogonal(self.vectors.row(idx as usize), q.words()) {
                return Ok(true);
            }
        }
        Ok(false)
    }
}
