//! kSUM with preprocessing and the reduction from Hamiltonian path.
//!
//! `Int(S)` has vertex 0 in its lowest bit. Lists hold `i128` values, which
//! is exact for every instance the reduction produces (at most 20 vertices).

use std::collections::HashSet;

use crate::error::{contract, Result};
use crate::hardness::graph::{next_same_weight, Digraph, PathTable};

/// Vertex limit for the reduction.
pub const HAMPATH_MAX_VERTICES: usize = 12;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KSumInstance {
    lists: Vec<Vec<i128>>,
}

/// One selection mask per list.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KSumQuery {
    pub masks: Vec<Vec<bool>>,
}

impl KSumInstance {
    pub fn new(lists: Vec<Vec<i128>>) -> Result<Self> {
        if lists.len() < 2 {
            return Err(contract(format!(
                "kSUM needs k >= 2 lists, got {}",
                lists.len()
            )));
        }
        Ok(KSumInstance { lists })
    }

    pub fn k(&self) -> usize {
        self.lists.len()
    }

    pub fn lists(&self) -> &[Vec<i128>] {
        &self.lists
    }
}

fn selected<'a>(list: &'a [i128], mask: &'a [bool]) -> impl Iterator<Item = i128> + 'a {
    list.iter().zip(mask).filter(|(_, &m)| m).map(|(&x, _)| x)
}

/// All sums `x_1 + ... + x_j` with `x_i` drawn from the selected entries.
fn partial_sums(inst: &KSumInstance, q: &KSumQuery, range: std::ops::Range<usize>) -> Vec<i128> {
    let mut sums = vec![0i128];
    for i in range {
        let picks: Vec<i128> = selected(&inst.lists[i], &q.masks[i]).collect();
        sums = sums
            .iter()
            .flat_map(|&s| picks.iter().map(move |&x| s + x))
            .collect();
        sums.sort_unstable();
        sums.dedup();
    }
    sums
}

/// Is there `x_i` selected from list `i` with `x_1 + ... + x_{k-1} = x_k`?
/// Partial sums of the first `ceil((k-1)/2)` lists are hashed; the remaining
/// lists are enumerated against them.
pub fn ksum_query_solve(inst: &KSumInstance, q: &KSumQuery) -> Result<bool> {
    let k = inst.k();
    if q.masks.len() != k
        || q.masks
            .iter()
            .zip(&inst.lists)
            .any(|(m, l)| m.len() != l.len())
    {
        return Err(contract("query masks do not match the instance lists"));
    }
    let h = (k - 1).div_ceil(2);
    let left: HashSet<i128> = partial_sums(inst, q, 0..h).into_iter().collect();
    if left.is_empty() {
        return Ok(false);
    }
    let right = partial_sums(inst, q, h..k - 1);
    for target in selected(&inst.lists[k - 1], &q.masks[k - 1]) {
        if right.iter().any(|&r| left.contains(&(target - r))) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The instance built from `n` and `k` alone, plus the vertex sets behind
/// each list position.
#[derive(Clone, Debug)]
pub struct HamPathKSum {
    pub n: usize,
    pub k: usize,
    /// All size-`n/k` vertex sets in increasing integer order.
    pub sets: Vec<u32>,
    pub instance: KSumInstance,
}

pub fn int_of_set(vertices: &[usize]) -> u64 {
    vertices.iter().fold(0, |m, &v| m | 1 << v)
}

/// `X_1 .. X_{k-1} = { Int(S) }`, `X_k = { 2^n - 1 - Int(S) }` over `|S| = n/k`.
pub fn hampath_reduction_build(n: usize, k: usize) -> Result<HamPathKSum> {
    if k < 2 || n == 0 || !n.is_multiple_of(k) {
        return Err(contract(format!(
            "k = {k} must be at least 2 and divide n = {n}; pad the graph first"
        )));
    }
    if n > HAMPATH_MAX_VERTICES {
        return Err(contract(format!(
            "n = {n} exceeds the limit of {HAMPATH_MAX_VERTICES} vertices"
        )));
    }
    let size = n / k;
    let mut sets = Vec::new();
    let mut s: u32 = (1 << size) - 1;
    while s < 1 << n {
        sets.push(s);
        s = next_same_weight(s);
    }
    let full = (1i128 << n) - 1;
    let ints: Vec<i128> = sets.iter().map(|&s| s as i128).collect();
    let mut lists = vec![ints.clone(); k - 1];
    lists.push(ints.iter().map(|&x| full - x).collect());
    Ok(HamPathKSum {
        n,
        k,
        sets,
        instance: KSumInstance::new(lists)?,
    })
}

/// One query per `(v_1, ..., v_{k+1})` in `[n]^{k+1}`, in lexicographic
/// order with `v_1` most significant.
///
/// For `i < k`, list `i` keeps `S` when `v_i` is in `S` and some simple path
/// from `v_i` covers exactly `S` and ends at an in-neighbour of `v_{i+1}`.
/// List `k` keeps `S` when `v_k` is in `S` and some simple path from `v_k`
/// covers `S`, with its end left free: a Hamiltonian path may end at a vertex
/// with no out-edge, so `v_{k+1}` does not constrain the last segment.
pub fn hampath_reduction_queries(
    g: &Digraph,
    red: &HamPathKSum,
    table: &PathTable,
) -> Result<Vec<KSumQuery>> {
    let mut out = Vec::new();
    for_each_hampath_query(g, red, table, |q| {
        out.push(q.clone());
        true
    })?;
    Ok(out)
}

/// Streams the queries of [`hampath_reduction_queries`]; stops early when
/// `f` returns `false`.
pub fn for_each_hampath_query(
    g: &Digraph,
    red: &HamPathKSum,
    table: &PathTable,
    mut f: impl FnMut(&KSumQuery) -> bool,
) -> Result<()> {
    let (n, k) = (red.n, red.k);
    if g.vertex_count() != n {
        return Err(contract(format!(
            "graph has {} vertices, reduction was built for {n}",
            g.vertex_count()
        )));
    }
    if table.vertex_count() != n || table.max_len() < n / k {
        return Err(contract("path table must cover sets of size n / k"));
    }
    // reach[u][v]: per set, does a path from u cover it and end next to v.
    let reach =
        |s: u32, u: usize, v: usize| s >> u & 1 == 1 && table.ends(s, u) & g.in_mask(v) != 0;
    let free = |s: u32, u: usize| s >> u & 1 == 1 && table.ends(s, u) != 0;
    let mut tuple = vec![0usize; k + 1];
    let total = n.pow(k as u32 + 1);
    let mut q = KSumQuery {
        masks: vec![vec![false; red.sets.len()]; k],
    };
    for code in 0..total {
        let mut c = code;
        for slot in tuple.iter_mut().rev() {
            *slot = c % n;
            c /= n;
        }
        for i in 0..k {
            for (j, &s) in red.sets.iter().enumerate() {
                q.masks[i][j] = if i + 1 < k {
                    reach(s, tuple[i], tuple[i + 1])
                } else {
                    free(s, tuple[i])
                };
            }
        }
        if !f(&q) {
            break;
        }
    }
    Ok(())
}

/// Decide Hamiltonicity through the reduction: pad, tabulate, OR the queries.
pub fn hampath_via_ksum(g: &Digraph, k: usize) -> Result<bool> {
    let g = g.pad_to_multiple(k)?;
    let red = hampath_reduction_build(g.vertex_count(), k)?;
    let table = crate::hardness::graph::simple_paths_dp(&g, g.vertex_count() / k)?;
    let mut found = false;
    let mut err = None;
    for_each_hampath_query(&g, &red, &table, |q| {
        match ksum_query_solve(&red.instance, q) {
            Ok(hit) => {
                found = hit;
                !hit
            }
            Err(e) => {
                err = Some(e);
                false
            }
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(found),
    }
}
