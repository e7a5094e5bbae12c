//! A common build/query surface over every OnlineOV structure in the crate.

use crate::avgcase::{avg_build, choose_t_avg, AvgStructure};
use crate::bits::{words_orthogonal, BitVec};
use crate::error::{check_dim, contract, Result};
use crate::instance::OVInstance;
use crate::oracle::{build_full_bitmap, linear_scan_query, query_full_bitmap, FullBitmap};
use crate::worstcase::{ov_pre, WorstStructure};

/// Per-query operation counters. Owned by the caller; never shared.
#[derive(Clone, Copy, Default, PartialEq, Eq, Debug)]
pub struct QueryStats {
    /// Orthogonality tests against stored vectors.
    pub candidate_checks: u64,
    pub bitmap_lookups: u64,
    pub nodes_visited: u64,
}

impl QueryStats {
    pub fn merge_max(&mut self, other: &QueryStats) {
        self.candidate_checks = self.candidate_checks.max(other.candidate_checks);
        self.bitmap_lookups = self.bitmap_lookups.max(other.bitmap_lookups);
        self.nodes_visited = self.nodes_visited.max(other.nodes_visited);
    }
}

/// A built structure that answers "is some stored vector orthogonal to `q`?".
pub trait OnlineOv {
    fn dim(&self) -> usize;

    fn query(&self, q: &BitVec) -> Result<bool>;
}

/// Something that turns an instance into an [`OnlineOv`] structure.
pub trait BuildOnlineOv {
    type Output: OnlineOv;

    fn build(&self, x: &OVInstance) -> Result<Self::Output>;
}

impl OnlineOv for OVInstance {
    fn dim(&self) -> usize {
        OVInstance::dim(self)
    }

    fn query(&self, q: &BitVec) -> Result<bool> {
        linear_scan_query(self, q)
    }
}

impl OnlineOv for FullBitmap {
    fn dim(&self) -> usize {
        FullBitmap::dim(self)
    }

    fn query(&self, q: &BitVec) -> Result<bool> {
        query_full_bitmap(self, q)
    }
}

/// How the average-case threshold `t` is chosen.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum AvgThreshold {
    Fixed(usize),
    /// `t = ceil(log_{1/p}(6 n^eps))`, clamped into `[1, d]`.
    Auto {
        p: f64,
        eps: f64,
    },
}

/// Engine selection plus its parameters.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum EngineConfig {
    /// Linear scan over the stored instance.
    Scan,
    /// Full `2^d` answer table.
    Oracle,
    Avg(AvgThreshold),
    /// Recursive structure with level `i`; `i` is clamped into `[1, d]`.
    Worst {
        i: usize,
    },
}

impl EngineConfig {
    pub fn name(&self) -> &'static str {
        match self {
            EngineConfig::Scan => "scan",
            EngineConfig::Oracle => "oracle",
            EngineConfig::Avg(_) => "avg",
            EngineConfig::Worst { .. } => "worst",
        }
    }

    /// The threshold an `Avg` config resolves to for an instance of this shape.
    pub fn resolve_avg_t(threshold: AvgThreshold, n: usize, d: usize) -> Result<usize> {
        match threshold {
            AvgThreshold::Fixed(t) => Ok(t),
            AvgThreshold::Auto { p, eps } => Ok(choose_t_avg(n as u64, p, eps)?.clamp(1, d.max(1))),
        }
    }
}

/// Any of the structures, behind one type.
#[derive(Clone, Debug)]
pub enum Engine {
    Scan(OVInstance),
    Oracle(FullBitmap),
    Avg(AvgStructure),
    Worst(WorstStructure),
}

impl OnlineOv for Engine {
    fn dim(&self) -> usize {
        match self {
            Engine::Scan(x) => x.dim(),
            Engine::Oracle(b) => b.dim(),
            Engine::Avg(s) => s.dim(),
            Engine::Worst(w) => w.dim(),
        }
    }

    fn query(&self, q: &BitVec) -> Result<bool> {
        match self {
            Engine::Scan(x) => linear_scan_query(x, q),
            Engine::Oracle(b) => query_full_bitmap(b, q),
            Engine::Avg(s) => s.query(q),
            Engine::Worst(w) => w.query(q),
        }
    }
}

impl Engine {
    pub fn query_with_stats(
        &self,
        q: &BitVec,
        stats: &mut QueryStats,
        short_circuit: bool,
    ) -> Result<bool> {
        match self {
            Engine::Scan(x) => {
                check_dim(x.dim(), q.dim())?;
                let mut found = false;
                for i in 0..x.len() {
                    stats.candidate_checks += 1;
                    if words_orthogonal(x.row(i), q.words()) {
                        found = true;
                        if short_circuit {
                            break;
                        }
                    }
                }
                Ok(found)
            }
            Engine::Oracle(b) => {
                stats.bitmap_lookups += 1;
                stats.nodes_visited += 1;
                query_full_bitmap(b, q)
            }
            Engine::Avg(s) => s.query_with_stats(q, stats),
            Engine::Worst(w) => w.query_with_stats(q, stats, short_circuit),
        }
    }
}

impl BuildOnlineOv for EngineConfig {
    type Output = Engine;

    fn build(&self, x: &OVInstance) -> Result<Engine> {
        match *self {
            EngineConfig::Scan => Ok(Engine::Scan(x.clone())),
            EngineConfig::Oracle => Ok(Engine::Oracle(build_full_bitmap(x)?)),
            EngineConfig::Avg(threshold) => {
                let t = Self::resolve_avg_t(threshold, x.len(), x.dim())?;
                Ok(Engine::Avg(avg_build(x, t)?))
            }
            EngineConfig::Worst { i } => {
                if i == 0 {
                    return Err(contract("recursion level must be at least 1"));
                }
                Ok(Engine::Worst(ov_pre(x, i.min(x.dim().max(1)))?))
            }
        }
    }
}
