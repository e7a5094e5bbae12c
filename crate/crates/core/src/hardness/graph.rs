//! Directed graphs, the bounded-length simple-path table and a brute-force
//! Hamiltonian path check.

use crate::error::{contract, Error, Result};

/// Largest vertex count supported by the bitmask representation.
pub const GRAPH_MAX_VERTICES: usize = 20;

/// Vertex sets are bitmasks with vertex 0 in the lowest bit.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Digraph {
    n: usize,
    out: Vec<u32>,
    inn: Vec<u32>,
}

impl Digraph {
    pub fn new(n: usize) -> Result<Self> {
        if n > GRAPH_MAX_VERTICES {
            return Err(contract(format!(
                "{n} vertices exceeds the limit of {GRAPH_MAX_VERTICES}"
            )));
        }
        Ok(Digraph {
            n,
            out: vec![0; n],
            inn: vec![0; n],
        })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Digraph::new(n)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Edge list: `u v` per line, 0-based. An optional `vertices N` line fixes
    /// the vertex count; otherwise it is one more than the largest endpoint.
    /// Blank lines and `#` comments are skipped.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut declared = None;
        let mut edges = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || {
                Error::Format(format!(
                    "line {}: expected `u v` or `vertices N`",
                    line_no + 1
                ))
            };
            let f: Vec<&str> = line.split_whitespace().collect();
            match f.as_slice() {
                ["vertices", n] => declared = Some(n.parse::<usize>().map_err(|_| bad())?),
                [u, v] => {
                    edges.push((u.parse().map_err(|_| bad())?, v.parse().map_err(|_| bad())?))
                }
                _ => return Err(bad()),
            }
        }
        let implied = edges
            .iter()
            .map(|&(u, v): &(usize, usize)| u.max(v) + 1)
            .max()
            .unwrap_or(0);
        let n = declared.unwrap_or(implied);
        if implied > n {
            return Err(Error::Format(format!(
                "edge endpoint {} outside the declared {n} vertices",
                implied - 1
            )));
        }
        Digraph::from_edges(n, &edges)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(contract(format!(
                "edge ({u}, {v}) outside {} vertices",
                self.n
            )));
        }
        self.out[u] |= 1 << v;
        self.inn[v] |= 1 << u;
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out[u] >> v & 1 == 1
    }

    pub fn out_mask(&self, u: usize) -> u32 {
        self.out[u]
    }

    pub fn in_mask(&self, v: usize) -> u32 {
        self.inn[v]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| {
                (0..self.n)
                    .filter(move |&v| self.has_edge(u, v))
                    .map(move |v| (u, v))
            })
            .collect()
    }

    /// Append a path on `k - (n mod k)` new vertices and an edge from every
    /// original vertex to its first vertex, so the vertex count becomes a
    /// multiple of `k`. Hamiltonicity is preserved. No-op when `k` divides `n`.
    pub fn pad_to_multiple(&self, k: usize) -> Result<Digraph> {
        if k == 0 {
            return Err(contract("k must be positive"));
        }
        let r = self.n % k;
        if r == 0 {
            return Ok(self.clone());
        }
        let extra = k - r;
        let mut g = Digraph::new(self.n + extra)?;
        for (u, v) in self.edges() {
            g.add_edge(u, v)?;
        }
        for u in 0..self.n {
            g.add_edge(u, self.n)?;
        }
        for j in 0..extra - 1 {
            g.add_edge(self.n + j, self.n + j + 1)?;
        }
        Ok(g)
    }
}

/// `ends(S, u)`: the set of `v` such that some simple path starts at `u`,
/// visits exactly the vertices of `S` and ends at `v`. Filled for
/// `|S| <= max_len`.
#[derive(Clone, Debug)]
pub struct PathTable {
    n: usize,
    max_len: usize,
    ends: Vec<u32>,
    touched: u64,
}

impl PathTable {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn ends(&self, set: u32, u: usize) -> u32 {
        debug_assert!(set.count_ones() as usize <= self.max_len);
        self.ends[set as usize * self.n + u]
    }

    pub fn get(&self, set: u32, u: usize, v: usize) -> bool {
        self.ends(set, u) >> v & 1 == 1
    }

    /// Table entries `(S, u, v)` written.
    pub fn touched(&self) -> u64 {
        self.touched
    }
}

/// Next mask with the same popcount (Gosper).
pub(crate) fn next_same_weight(x: u32) -> u32 {
    let c = x & x.wrapping_neg();
    let r = x + c;
    (((r ^ x) >> 2) / c) | r
}

/// Subset dynamic program over sets of size at most `len`, smallest first.
pub fn simple_paths_dp(g: &Digraph, len: usize) -> Result<PathTable> {
    let n = g.n;
    if len > n {
        return Err(contract(format!("path length {len} exceeds {n} vertices")));
    }
    let mut ends = vec![0u32; (1usize << n) * n];
    let mut touched = 0u64;
    for u in 0..n {
        ends[(1usize << u) * n + u] = 1 << u;
        touched += 1;
    }
    for size in 2..=len {
        let mut set: u32 = (1 << size) - 1;
        while set < 1 << n {
            let mut us = set;
            while us != 0 {
                let u = us.trailing_zeros() as usize;
                us &= us - 1;
                let mut acc = 0u32;
                let mut vs = set & !(1 << u);
                while vs != 0 {
                    let v = vs.trailing_zeros() as usize;
                    vs &= vs - 1;
                    let prev = set & !(1 << v);
                    if ends[prev as usize * n + u] & g.inn[v] != 0 {
                        acc |= 1 << v;
                    }
                    touched += 1;
                }
                ends[set as usize * n + u] = acc;
            }
            set = next_same_weight(set);
        }
    }
    Ok(PathTable {
        n,
        max_len: len,
        ends,
        touched,
    })
}

/// Hamiltonian path by depth-first search over vertex orders.
pub fn hampath_oracle(g: &Digraph) -> bool {
    fn extend(g: &Digraph, at: usize, visited: u32, full: u32) -> bool {
        if visited == full {
            return true;
        }
        let mut next = g.out[at] & !visited;
        while next != 0 {
            let v = next.trailing_zeros() as usize;
            next &= next - 1;
            if extend(g, v, visited | 1 << v, full) {
                return true;
            }
        }
        false
    }
    if g.n == 0 {
        return true;
    }
    let full = ((1u64 << g.n) - 1) as u32;
    (0..g.n).any(|s| extend(g, s, 1 << s, full))
}
