//! Worst-case recursive structure.
//!
//! At level `i` with `n >= 2` vectors in dimension `d`, a node stores the
//! answers to all queries of weight `< t`, splits the input with the greedy
//! pseudorandom partition `(m, t)`, keeps candidate lists over the residual,
//! and recurses at level `i - 1` on every extracted block restricted to the
//! coordinates outside its shared zero set. A single vector is stored as a
//! leaf; level 1 stores the full answer table.
//!
//! Rounding: `t = max(1, floor(d / i))` and `m = ceil(n^(1 - 1/i))`, both in
//! exact integer arithmetic. The bound helpers use the same rounded values.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::bits::{gather_words, words_for, words_orthogonal, BitVec, CoordSet};
use crate::candidates::{build_sparse_bitmap, CandidateLists, SparseBitmap};
use crate::combinatorics::{binom_leq, Binomials};
use crate::engine::QueryStats;
use crate::error::{check_dim, contract, Error, Result};
use crate::instance::OVInstance;
use crate::oracle::{closure_cost, orthogonality_closure, FullBitmap};
use crate::partition::partition_indexed;

/// Constant `K` in the checked preprocessing bound
/// `build_ops <= K * binom(d, <= t) * i * d * n`.
pub const BUILD_COST_CONSTANT: u32 = 8;

/// `ceil(n^(1 - 1/i))`: the least `m` with `m^i >= n^(i - 1)`.
pub fn ceil_root_power(n: u64, i: u32) -> u64 {
    assert!(i >= 1);
    if i == 1 || n <= 1 {
        return 1;
    }
    let target = BigUint::from(n).pow(i - 1);
    let floor = target.nth_root(i);
    let m = if floor.pow(i) == target {
        floor
    } else {
        floor + 1u32
    };
    m.to_u64().expect("root fits since m <= n")
}

/// `t = max(1, floor(d / i))` for `i >= 1`.
pub fn threshold_for_level(d: usize, i: usize) -> usize {
    (d / i.max(1)).max(1)
}

/// Block size and zero-set size for an internal node.
pub fn derive_params(n: u64, d: usize, i: usize) -> Result<(u64, usize)> {
    if i < 2 || i > d {
        return Err(contract(format!(
            "derive_params needs 2 <= i <= d, got i = {i}, d = {d}"
        )));
    }
    if n < 2 {
        return Err(contract("derive_params needs n >= 2"));
    }
    let m = ceil_root_power(n, i as u32).max(1);
    Ok((m, threshold_for_level(d, i)))
}

/// A level choice together with any violated hypothesis.
#[derive(Clone, PartialEq, Debug)]
pub struct Schedule {
    pub i: usize,
    pub warning: Option<String>,
}

fn clamp_level(raw: f64, d: usize, warning: &mut Option<String>) -> usize {
    let hi = d.max(1);
    if raw < 1.0 {
        *warning.get_or_insert_with(String::new) += &format!(" level {raw:.3} clamped to 1;");
        1
    } else if raw > hi as f64 {
        *warning.get_or_insert_with(String::new) +=
            &format!(" level {raw:.3} clamped to d = {hi};");
        hi
    } else {
        raw as usize
    }
}

/// Level for dimension `d = c log n`: `i = round(2 c log2(c) / delta)`.
pub fn schedule_for_loglinear(c: f64, delta: f64, d: usize) -> Schedule {
    let mut warning = None;
    if c < 2.0 {
        warning = Some(format!("c = {c} is below 2;"));
    }
    let needed = 2.0 * std::f64::consts::E * c.log2() / c;
    if delta < needed - 1e-12 {
        *warning.get_or_insert_with(String::new) +=
            &format!(" delta = {delta} is below 2e log2(c)/c = {needed:.4};");
    }
    let raw = (2.0 * c * c.log2() / delta).round();
    let i = clamp_level(raw, d, &mut warning);
    Schedule { i, warning }
}

/// Level for query time `n^(1-eps) d`:
/// `i = floor(log n / (eps log n + log log n))`, logs base 2.
pub fn schedule_for_eps(n: u64, eps: f64, d: usize) -> Schedule {
    let mut warning = None;
    let log_n = (n.max(2) as f64).log2();
    let loglog = log_n.log2();
    if eps >= 0.5 {
        warning = Some(format!("eps = {eps} is not below 1/2;"));
    }
    if eps < loglog / log_n - 1e-12 {
        *warning.get_or_insert_with(String::new) += &format!(
            " eps = {eps} is below log log n / log n = {:.4};",
            loglog / log_n
        );
    }
    let exact = log_n / (eps * log_n + loglog);
    let snapped = if (exact - exact.round()).abs() < 1e-9 {
        exact.round()
    } else {
        exact.floor()
    };
    let i = clamp_level(snapped, d, &mut warning);
    Schedule { i, warning }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Child {
    pub zero_set: CoordSet,
    /// Coordinates outside `zero_set`, in order; the child's coordinate `j`
    /// is the parent's `keep[j]`.
    pub(crate) keep: Vec<usize>,
    pub node: WorstNode,
}

#[derive(Clone, Debug)]
pub struct InternalNode {
    pub(crate) dim: usize,
    pub(crate) level: usize,
    pub(crate) t: usize,
    pub(crate) m: u64,
    pub(crate) n: u64,
    pub(crate) sparse: SparseBitmap,
    pub(crate) residual: OVInstance,
    pub(crate) lists: CandidateLists,
    pub(crate) children: Vec<Child>,
    pub(crate) binom: Binomials,
}

impl PartialEq for InternalNode {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.level == other.level
            && self.t == other.t
            && self.m == other.m
            && self.n == other.n
            && self.sparse == other.sparse
            && self.residual == other.residual
            && self.lists == other.lists
            && self.children == other.children
    }
}

impl Eq for InternalNode {}

impl InternalNode {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        dim: usize,
        level: usize,
        t: usize,
        m: u64,
        n: u64,
        sparse: SparseBitmap,
        residual: OVInstance,
        lists: CandidateLists,
        children: Vec<Child>,
    ) -> Result<Self> {
        if t == 0 || t > dim || level < 2 || residual.dim() != dim {
            return Err(Error::Format("inconsistent internal node header".into()));
        }
        let binom = Binomials::new(dim, t)?;
        if sparse.len() != binom.count_below(t) || lists.list_count() as u64 != binom.get(dim, t) {
            return Err(Error::Format(
                "internal node tables disagree with (d, t)".into(),
            ));
        }
        if lists.entries.iter().any(|&e| e as usize >= residual.len()) {
            return Err(Error::Format("candidate index past the residual".into()));
        }
        Ok(InternalNode {
            dim,
            level,
            t,
            m,
            n,
            sparse,
            residual,
            lists,
            children,
            binom,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn residual(&self) -> &OVInstance {
        &self.residual
    }

    pub fn lists(&self) -> &CandidateLists {
        &self.lists
    }

    pub fn sparse_bitmap(&self) -> &SparseBitmap {
        &self.sparse
    }

    pub fn children(&self) -> &[Child] {
        &self.children
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum WorstNode {
    Leaf { vector: BitVec },
    Dense { bitmap: FullBitmap },
    Internal(Box<InternalNode>),
}

impl WorstNode {
    pub fn dim(&self) -> usize {
        match self {
            WorstNode::Leaf { vector } => vector.dim(),
            WorstNode::Dense { bitmap } => bitmap.dim(),
            WorstNode::Internal(node) => node.dim,
        }
    }
}

/// Bits charged by the analysis for a subtree.
#[derive(Clone, Copy, Default, PartialEq, Eq, Debug)]
pub struct SpaceAccount {
    pub accounted_bits: u128,
    pub bitmap_bits: u128,
    pub vector_bits: u128,
    pub zero_set_bits: u128,
}

impl std::ops::Add for SpaceAccount {
    type Output = SpaceAccount;

    fn add(self, o: SpaceAccount) -> SpaceAccount {
        SpaceAccount {
            accounted_bits: self.accounted_bits + o.accounted_bits,
            bitmap_bits: self.bitmap_bits + o.bitmap_bits,
            vector_bits: self.vector_bits + o.vector_bits,
            zero_set_bits: self.zero_set_bits + o.zero_set_bits,
        }
    }
}

/// Leaf: `d`. Dense: `2^d`. Internal: sparse bitmap + `d` per candidate
/// entry + for every child `d` (its zero set) plus the child's own bits.
pub fn space_account(node: &WorstNode) -> SpaceAccount {
    match node {
        WorstNode::Leaf { vector } => SpaceAccount {
            accounted_bits: vector.dim() as u128,
            vector_bits: vector.dim() as u128,
            ..Default::default()
        },
        WorstNode::Dense { bitmap } => SpaceAccount {
            accounted_bits: bitmap.len_bits(),
            bitmap_bits: bitmap.len_bits(),
            ..Default::default()
        },
        WorstNode::Internal(node) => {
            let d = node.dim as u128;
            let own = SpaceAccount {
                bitmap_bits: node.sparse.len() as u128,
                vector_bits: d * node.lists.total_entries() as u128,
                zero_set_bits: d * node.children.len() as u128,
                accounted_bits: 0,
            };
            let own = SpaceAccount {
                accounted_bits: own.bitmap_bits + own.vector_bits + own.zero_set_bits,
                ..own
            };
            node.children
                .iter()
                .fold(own, |acc, c| acc + space_account(&c.node))
        }
    }
}

/// Built structure plus the parameters it was built with.
#[derive(Clone, Debug)]
pub struct WorstStructure {
    pub(crate) root: WorstNode,
    pub(crate) level: usize,
    pub(crate) n: u64,
    pub(crate) build_ops: u128,
}

/// Equality ignores the build counter, which a deserialized tree lacks.
impl PartialEq for WorstStructure {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root && self.level == other.level && self.n == other.n
    }
}

impl Eq for WorstStructure {}

/// Preprocess `x` at recursion level `i` (`1 <= i <= d`).
pub fn ov_pre(x: &OVInstance, i: usize) -> Result<WorstStructure> {
    if x.is_empty() {
        return Err(contract("cannot build over an empty instance"));
    }
    if i == 0 || i > x.dim() {
        return Err(contract(format!(
            "recursion level i = {i} must satisfy 1 <= i <= d = {}",
            x.dim()
        )));
    }
    let mut ops = 0u128;
    let root = build_node(x, i, &mut ops)?;
    Ok(WorstStructure {
        root,
        level: i,
        n: x.len() as u64,
        build_ops: ops,
    })
}

fn build_dense(x: &OVInstance, ops: &mut u128) -> Result<WorstNode> {
    *ops += closure_cost(x.dim(), x.len());
    Ok(WorstNode::Dense {
        bitmap: orthogonality_closure(x)?,
    })
}

fn build_node(x: &OVInstance, level: usize, ops: &mut u128) -> Result<WorstNode> {
    let d = x.dim();
    let n = x.len();
    if n == 1 {
        *ops += d as u128;
        return Ok(WorstNode::Leaf {
            vector: x.vector(0),
        });
    }
    if level == 1 {
        return build_dense(x, ops);
    }
    if level > d {
        // Unreachable under d - floor(d/i) >= i - 1; kept as a total fallback.
        debug_assert!(false, "level {level} exceeds dimension {d}");
        return build_dense(x, ops);
    }
    let (m, t) = derive_params(n as u64, d, level)?;
    let binom = Binomials::new(d, t)?;
    let (sparse, sparse_work) = build_sparse_bitmap(x, t, &binom)?;
    *ops += sparse_work;

    let work = partition_indexed(x, m as usize, t, &binom)?;
    *ops += work.index_work + work.stats.zero_tests + work.residual_lists.total_entries() as u128;
    let lists = work.residual_lists;
    let longest = lists.max_len() as u64;
    if longest >= m {
        return Err(Error::Contract(format!(
            "residual candidate list of length {longest} reaches m = {m}"
        )));
    }

    let mut children = Vec::with_capacity(work.result.parts.len());
    for part in &work.result.parts {
        let complement = part.zero_set.complement();
        let keep = complement.members().to_vec();
        let block = x.gather(&part.indices, &keep);
        *ops += (part.indices.len() * d) as u128;
        let node = build_node(&block, level - 1, ops)?;
        children.push(Child {
            zero_set: part.zero_set.clone(),
            keep,
            node,
        });
    }
    Ok(WorstNode::Internal(Box::new(InternalNode {
        dim: d,
        level,
        t,
        m,
        n: n as u64,
        sparse,
        residual: work.result.residual,
        lists,
        children,
        binom,
    })))
}

fn query_node(node: &WorstNode, q: &[u64], stats: &mut QueryStats, short_circuit: bool) -> bool {
    stats.nodes_visited += 1;
    match node {
        WorstNode::Leaf { vector } => {
            stats.candidate_checks += 1;
            words_orthogonal(vector.words(), q)
        }
        WorstNode::Dense { bitmap } => {
            stats.bitmap_lookups += 1;
            bitmap.lookup_words(q)
        }
        WorstNode::Internal(node) => {
            let w: usize = q.iter().map(|x| x.count_ones() as usize).sum();
            if w < node.t {
                stats.bitmap_lookups += 1;
                return node.sparse.get(node.binom.rank_sparse_words(q, w));
            }
            let rank = node
                .binom
                .rank_lowest_ones(q, node.t)
                .expect("weight is at least t");
            let mut found = false;
            for &idx in node.lists.list(rank) {
                stats.candidate_checks += 1;
                if words_orthogonal(node.residual.row(idx as usize), q) {
                    found = true;
                    if short_circuit {
                        return true;
                    }
                }
            }
            let mut sub = Vec::new();
            for child in &node.children {
                sub.resize(words_for(child.keep.len()), 0);
                gather_words(q, &child.keep, &mut sub);
                if query_node(&child.node, &sub, stats, short_circuit) {
                    found = true;
                    if short_circuit {
                        return true;
                    }
                }
            }
            found
        }
    }
}

impl WorstStructure {
    pub(crate) fn from_parts(root: WorstNode, level: usize, n: u64) -> Self {
        WorstStructure {
            root,
            level,
            n,
            build_ops: 0,
        }
    }

    pub fn root(&self) -> &WorstNode {
        &self.root
    }

    pub fn dim(&self) -> usize {
        self.root.dim()
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Operations counted during preprocessing (zero for a deserialized tree).
    pub fn build_ops(&self) -> u128 {
        self.build_ops
    }

    pub fn space_account(&self) -> SpaceAccount {
        space_account(&self.root)
    }

    pub fn query(&self, q: &BitVec) -> Result<bool> {
        self.query_with_stats(q, &mut QueryStats::default(), true)
    }

    /// With `short_circuit == false` every candidate list and child is
    /// visited even after a hit; the answer is unchanged.
    pub fn query_with_stats(
        &self,
        q: &BitVec,
        stats: &mut QueryStats,
        short_circuit: bool,
    ) -> Result<bool> {
        check_dim(self.dim(), q.dim())?;
        Ok(query_node(&self.root, q.words(), stats, short_circuit))
    }

    /// Structural invariants of the whole tree; returns the first violation.
    pub fn validate(&self) -> Result<()> {
        validate_node(&self.root, self.level, self.n)
    }
}

/// Query entry point mirroring the node-level interface.
pub fn ov_onl(s: &WorstStructure, q: &BitVec, stats: &mut QueryStats) -> Result<bool> {
    s.query_with_stats(q, stats, true)
}

fn validate_node(node: &WorstNode, level: usize, n: u64) -> Result<()> {
    let fail = |msg: String| Err(Error::Contract(msg));
    match node {
        WorstNode::Leaf { .. } if n != 1 => fail(format!("leaf holds {n} vectors")),
        WorstNode::Leaf { .. } => Ok(()),
        WorstNode::Dense { .. } if level != 1 && level <= node.dim() => {
            fail(format!("dense node at level {level}"))
        }
        WorstNode::Dense { .. } => Ok(()),
        WorstNode::Internal(node) => {
            if node.level != level || node.n != n || n < 2 || level < 2 {
                return fail(format!("internal node header mismatch at level {level}"));
            }
            if node.level > node.dim {
                return fail(format!(
                    "level {} exceeds dimension {}",
                    node.level, node.dim
                ));
            }
            if node.lists.max_len() as u64 >= node.m {
                return fail("candidate list reaches m".into());
            }
            if node.children.len() as u64 > n.div_ceil(node.m) {
                return fail("too many children".into());
            }
            let stored = node.residual.len() as u64 + node.children.len() as u64 * node.m;
            if stored != n {
                return fail(format!("residual plus blocks hold {stored} of {n} vectors"));
            }
            for child in &node.children {
                if child.zero_set.len() != node.t || child.node.dim() != node.dim - node.t {
                    return fail("child dimension does not telescope".into());
                }
                validate_node(&child.node, level - 1, node.m)?;
            }
            Ok(())
        }
    }
}

/// Ceiling-adjusted query bound `2 i d ceil(n^(1-1/i))`.
pub fn query_bound(n: u64, d: usize, i: usize) -> u128 {
    2 * i as u128 * d as u128 * ceil_root_power(n, i as u32) as u128
}

/// Ceiling-adjusted space bound `binom(d, <= t) i d ceil(n^(1-1/i))`, `t` as
/// implemented (`t = d` at level 1).
pub fn space_bound(n: u64, d: usize, i: usize) -> BigUint {
    let t = if i == 1 { d } else { threshold_for_level(d, i) };
    binom_leq(d, t)
        * BigUint::from(i)
        * BigUint::from(d)
        * BigUint::from(ceil_root_power(n, i as u32))
}

/// `K binom(d, <= t) i d n` with `K = BUILD_COST_CONSTANT`.
pub fn preprocessing_bound(n: u64, d: usize, i: usize) -> BigUint {
    let t = if i == 1 { d } else { threshold_for_level(d, i) };
    binom_leq(d, t)
        * BigUint::from(BUILD_COST_CONSTANT)
        * BigUint::from(i)
        * BigUint::from(d)
        * BigUint::from(n)
}

/// Exact `2^d` for reporting.
pub fn dense_bits(d: usize) -> BigUint {
    BigUint::one() << d
}
