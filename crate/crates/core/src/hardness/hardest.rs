//! The formula-independent sparse instance whose orthogonality queries decide
//! k-CNF satisfiability.
//!
//! The `n` variables are split into `theta = k / delta` consecutive blocks of
//! `n / theta` variables. Coordinates are pairs `(B, mu_B)` with `B` a size-`k`
//! set of blocks and `mu_B` an assignment to the variables of `B`; the index
//! is `rank(B) * 2^(k n / theta) + mu_B`, with `B` ranked in colex order and
//! the lowest variable of `B` in the lowest bit of `mu_B`. Assignment `mu`
//! (variable `j` at bit `j`) is vector number `mu`.

use std::fmt;
use std::str::FromStr;

use crate::bits::BitVec;
use crate::combinatorics::ColexSubsets;
use crate::error::{contract, Error, Result};
use crate::hardness::cnf::Cnf;
use crate::instance::OVInstance;

/// Default cap on the variable count (the instance has `2^n` vectors).
pub const HARDEST_DESK_CAP: usize = 16;

/// `delta = num / den` in `(0, 1]`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Delta {
    pub num: u64,
    pub den: u64,
}

impl Delta {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 || num > den {
            return Err(contract(format!("delta = {num}/{den} must lie in (0, 1]")));
        }
        Ok(Delta { num, den })
    }
}

impl FromStr for Delta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Format(format!("delta {s:?}: expected a fraction like 1/2"));
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            ),
            None => (s.trim().parse().map_err(|_| bad())?, 1),
        };
        Delta::new(num, den)
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Clone, Debug)]
pub struct HardInstance {
    n: usize,
    k: usize,
    delta: Delta,
    theta: usize,
    block_size: usize,
    /// Block sets as bitmasks over block indices, in colex order.
    block_sets: Vec<u64>,
    vectors: OVInstance,
    /// Set bits written during construction.
    build_touches: u64,
}

pub fn build_hardest_instance(n: usize, k: usize, delta: Delta) -> Result<HardInstance> {
    build_hardest_instance_capped(n, k, delta, HARDEST_DESK_CAP)
}

pub fn build_hardest_instance_capped(
    n: usize,
    k: usize,
    delta: Delta,
    cap: usize,
) -> Result<HardInstance> {
    if k == 0 {
        return Err(contract("clause width k must be at least 1"));
    }
    let scaled = k as u64 * delta.den;
    if !scaled.is_multiple_of(delta.num) {
        return Err(contract(format!(
            "theta = k / delta = {k} / ({delta}) is not an integer"
        )));
    }
    let theta = (scaled / delta.num) as usize;
    if theta < k {
        return Err(contract(format!("theta = {theta} is below k = {k}")));
    }
    if n == 0 || !n.is_multiple_of(theta) {
        return Err(contract(format!(
            "n = {n} variables cannot be split into theta = {theta} equal blocks"
        )));
    }
    if n > cap || n > 30 {
        return Err(contract(format!(
            "n = {n} exceeds the cap of {} variables",
            cap.min(30)
        )));
    }
    let block_size = n / theta;
    let mut block_sets = Vec::new();
    let mut walk = ColexSubsets::new(theta, k);
    while walk.advance() {
        block_sets.push(walk.current().iter().fold(0u64, |m, &b| m | 1 << b));
    }
    let span = 1usize << (k * block_size);
    let dim = block_sets
        .len()
        .checked_mul(span)
        .ok_or_else(|| contract("instance dimension overflows"))?;

    let mut vectors = OVInstance::empty(dim);
    let mut v = BitVec::zeros(dim);
    let mut touches = 0u64;
    let mut set_coords = Vec::with_capacity(block_sets.len());
    for mu in 0..1u64 << n {
        set_coords.clear();
        for (r, &bset) in block_sets.iter().enumerate() {
            let idx = r * span + project(mu, bset, block_size) as usize;
            v.set(idx, true);
            set_coords.push(idx);
            touches += 1;
        }
        vectors.push(&v)?;
        for &idx in &set_coords {
            v.set(idx, false);
        }
    }
    Ok(HardInstance {
        n,
        k,
        delta,
        theta,
        block_size,
        block_sets,
        vectors,
        build_touches: touches,
    })
}

/// Restriction of `mu` to the blocks in `bset`, packed low block first.
fn project(mu: u64, bset: u64, block_size: usize) -> u64 {
    let mask = (1u64 << block_size) - 1;
    let mut out = 0u64;
    let mut shift = 0;
    let mut rest = bset;
    while rest != 0 {
        let b = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        out |= ((mu >> (b * block_size)) & mask) << shift;
        shift += block_size;
    }
    out
}

impl HardInstance {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn delta(&self) -> Delta {
        self.delta
    }

    pub fn theta(&self) -> usize {
        self.theta
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    /// Number of vectors, `2^n`.
    pub fn count(&self) -> usize {
        self.vectors.len()
    }

    pub fn dim(&self) -> usize {
        self.vectors.dim()
    }

    /// Set bits per vector, `binom(theta, k)`.
    pub fn weight(&self) -> usize {
        self.block_sets.len()
    }

    pub fn vectors(&self) -> &OVInstance {
        &self.vectors
    }

    pub fn build_touches(&self) -> u64 {
        self.build_touches
    }

    /// Blocks in `B` and the packed `mu_B` for a coordinate.
    pub fn coord_label(&self, index: usize) -> (Vec<usize>, u64) {
        let span = 1usize << (self.k * self.block_size);
        let bset = self.block_sets[index / span];
        let blocks = (0..self.theta).filter(|b| bset >> b & 1 == 1).collect();
        (blocks, (index % span) as u64)
    }
}

/// Query encoding plus the number of coordinate evaluations it performed.
#[derive(Clone, Debug)]
pub struct CnfQuery {
    pub vector: BitVec,
    pub ops: u64,
}

/// Neighbourhood of a clause as a block mask, padded with the lowest-index
/// unused blocks until it holds exactly `k` blocks.
fn padded_neighbourhood(h: &HardInstance, vars: u64) -> u64 {
    let mut bset = 0u64;
    let mut rest = vars;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        bset |= 1 << (v / h.block_size);
    }
    let mut b = 0;
    while (bset.count_ones() as usize) < h.k {
        bset |= 1 << b;
        b += 1;
    }
    bset
}

/// Bit `(B, mu_B)` is 0 iff every clause whose padded neighbourhood is `B` is
/// satisfied by `mu_B`.
pub fn encode_cnf_query(h: &HardInstance, phi: &Cnf) -> Result<CnfQuery> {
    if phi.var_count() != h.n {
        return Err(contract(format!(
            "formula has {} variables, instance has {}",
            phi.var_count(),
            h.n
        )));
    }
    if phi.width() > h.k {
        return Err(contract(format!(
            "clause width {} exceeds k = {}",
            phi.width(),
            h.k
        )));
    }
    let span = 1usize << (h.k * h.block_size);
    // Clauses grouped by block set, with masks projected into mu_B space.
    let mut groups: Vec<Vec<(u64, u64)>> = vec![Vec::new(); h.block_sets.len()];
    for clause in phi.clauses() {
        let (pos, neg) = Cnf::clause_masks(clause);
        let bset = padded_neighbourhood(h, pos | neg);
        let r = h
            .block_sets
            .iter()
            .position(|&b| b == bset)
            .expect("padded neighbourhood has k blocks");
        groups[r].push((
            project(pos, bset, h.block_size),
            project(neg, bset, h.block_size),
        ));
    }
    let mut q = BitVec::zeros(h.dim());
    let mut ops = 0u64;
    for (r, group) in groups.iter().enumerate() {
        if group.is_empty() {
            ops += span as u64;
            continue;
        }
        for mu_b in 0..span as u64 {
            ops += 1;
            let ok = group.iter().all(|&(p, n)| mu_b & p != 0 || !mu_b & n != 0);
            if !ok {
                q.set(r * span + mu_b as usize, true);
            }
        }
    }
    Ok(CnfQuery { vector: q, ops })
}

/// Index of some vector orthogonal to `q`, by a linear scan.
pub fn find_orthogonal(h: &HardInstance, q: &BitVec) -> Option<usize> {
    (0..h.count()).find(|&i| crate::bits::words_orthogonal(h.vectors.row(i), q.words()))
}
