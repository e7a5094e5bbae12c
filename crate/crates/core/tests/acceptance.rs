//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails. Reference answers come from small oracles
//! written here, not from the library.

// Tolerances are named constants, some of them zero.
#![allow(clippy::absurd_extreme_comparisons)]

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigUint;
use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use oov_core::bits::{BitVec, CoordSet};
use oov_core::codec::{
    decode_structure, encode_structure, instance_from_bytes, instance_to_binary, instance_to_text,
    ContainerParams,
};
use oov_core::engine::{AvgThreshold, BuildOnlineOv, Engine, EngineConfig, OnlineOv, QueryStats};
use oov_core::hardness::{
    build_hardest_instance, encode_cnf_query, find_orthogonal, hampath_oracle,
    hampath_reduction_build, hampath_reduction_queries, ksum_query_solve, sat_oracle,
    simple_paths_dp, Cnf, Delta, Digraph, HardInstance,
};
use oov_core::instance::{sample_instance, OVInstance};
use oov_core::partition::pseudorandom_partition;
use oov_core::reductions::{
    ContainmentIndex, DNFFormula, DnfEvaluator, Literal, PMPattern, PartialMatchIndex, PmSymbol,
    SubsetIndex,
};

// ---------------------------------------------------------------- tolerances

/// Every equivalence and bound criterion tolerates no violation at all.
const MAX_VIOLATIONS: u64 = 0;
/// Consecutive scaling rows: observed growth of max candidate checks must lie
/// within this factor of the growth of ceil(n^(1/2)).
const SCALING_FACTOR: f64 = 4.0;
/// avg-engine threshold parameter when t is chosen from (p, eps).
const AVG_EPS: f64 = 0.5;

// ---------------------------------------------------------------- helpers

struct Rand(SplitMix64);

impl Rand {
    fn new(seed: u64) -> Self {
        Rand(SplitMix64::seed_from_u64(seed))
    }

    fn below(&mut self, n: u64) -> u64 {
        self.0.next_u64() % n
    }

    fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below((hi - lo + 1) as u64) as usize
    }

    fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }

    /// `k` distinct values from `0..n`.
    fn distinct(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.below((n - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}

/// Rows as integers with coordinate `j` at bit `j`, read one coordinate at a time.
fn row_masks(x: &OVInstance) -> Vec<u64> {
    assert!(x.dim() <= 64);
    x.vectors()
        .map(|v| {
            (0..x.dim())
                .filter(|&j| v.get(j))
                .fold(0u64, |m, j| m | 1 << j)
        })
        .collect()
}

fn vec_of_mask(d: usize, mask: u64) -> BitVec {
    let bits: Vec<bool> = (0..d).map(|j| mask >> j & 1 == 1).collect();
    BitVec::from_bools(&bits)
}

fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for j in 0..k {
        r = r * (n - j) as u128 / (j + 1) as u128;
    }
    r
}

fn binom_at_most(d: u64, t: u64) -> BigUint {
    (0..=t.min(d)).map(|w| BigUint::from(binom(d, w))).sum()
}

/// Least `m` with `m^i >= n^(i-1)`, i.e. ceil(n^(1 - 1/i)).
fn ceil_root(n: u64, i: u32) -> u64 {
    let target = BigUint::from(n).pow(i - 1);
    let mut m = ((n as f64).powf(1.0 - 1.0 / i as f64).floor() as u64).saturating_sub(2);
    while BigUint::from(m).pow(i) < target {
        m += 1;
    }
    m
}

/// Sparsity threshold of a level-`i` structure.
fn level_threshold(d: usize, i: usize) -> usize {
    if i == 1 {
        d
    } else {
        (d / i).max(1)
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: u32, name: &str, start: Instant, o: &Outcome) {
    println!(
        "criterion {id} {name:<28} {}  {}  [{:.1}s]",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail,
        start.elapsed().as_secs_f64()
    );
}

// ---------------------------------------------------------------- 1, 2, 3

struct Sweep {
    instances: u64,
    builds: u64,
    queries: u64,
    mismatches: u64,
    worst_builds: u64,
    space_violations: u64,
    query_violations: u64,
}

/// Exhaustive comparison against a scan for the full parameter grid, with the
/// worst-case space and per-query bounds checked on the same structures.
fn sweep() -> Sweep {
    let mut s = Sweep {
        instances: 0,
        builds: 0,
        queries: 0,
        mismatches: 0,
        worst_builds: 0,
        space_violations: 0,
        query_violations: 0,
    };
    for seed in 0..50u64 {
        for n in [1usize, 2, 17, 64] {
            for d in [1usize, 4, 8, 12] {
                for (pi, p) in [0.25, 0.5, 0.75].into_iter().enumerate() {
                    let inst_seed =
                        seed * 1_000_003 + (n as u64) * 1009 + (d as u64) * 31 + pi as u64;
                    let x = sample_instance(n, d, p, inst_seed).unwrap();
                    s.instances += 1;
                    let masks = row_masks(&x);
                    let truth: Vec<bool> = (0..1u64 << d)
                        .map(|q| masks.iter().any(|&v| v & q == 0))
                        .collect();
                    let queries: Vec<BitVec> = (0..1u64 << d).map(|q| vec_of_mask(d, q)).collect();

                    let mut configs: Vec<EngineConfig> =
                        (1..=d.min(5)).map(|i| EngineConfig::Worst { i }).collect();
                    configs.push(EngineConfig::Avg(AvgThreshold::Auto { p, eps: AVG_EPS }));
                    for cfg in configs {
                        let engine = cfg.build(&x).unwrap();
                        s.builds += 1;
                        let limits = match &engine {
                            Engine::Worst(w) => {
                                let i = w.level();
                                let m = ceil_root(n as u64, i as u32);
                                let t = level_threshold(d, i);
                                let space = binom_at_most(d as u64, t as u64) * (i * d) as u64 * m;
                                s.worst_builds += 1;
                                if BigUint::from(w.space_account().accounted_bits) > space {
                                    s.space_violations += 1;
                                }
                                Some(2 * (i * d) as u64 * m)
                            }
                            _ => None,
                        };
                        for (q, &want) in queries.iter().zip(&truth) {
                            let mut st = QueryStats::default();
                            let got = engine.query_with_stats(q, &mut st, false).unwrap();
                            s.queries += 1;
                            if got != want {
                                s.mismatches += 1;
                            }
                            if limits.is_some_and(|l| st.candidate_checks > l) {
                                s.query_violations += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    s
}

struct ScalingRow {
    n: usize,
    d: usize,
    m: u64,
    max_checks: u64,
    bound: u64,
    mismatches: u64,
}

fn scaling_table() -> Vec<ScalingRow> {
    let mut rows = Vec::new();
    for (r, log_n) in [10u32, 12, 14].into_iter().enumerate() {
        let n = 1usize << log_n;
        let d = 2 * log_n as usize;
        let i = 2;
        let x = sample_instance(n, d, 0.5, 0x5ca1_e000 + r as u64).unwrap();
        let qs = sample_instance(1000, d, 0.5, 0x5ca1_e100 + r as u64).unwrap();
        let masks = row_masks(&x);
        let engine = EngineConfig::Worst { i }.build(&x).unwrap();
        let m = ceil_root(n as u64, i as u32);
        let bound = 2 * (i * d) as u64 * m;
        let mut max_checks = 0;
        let mut mismatches = 0;
        for (q, qm) in qs.vectors().zip(row_masks(&qs)) {
            let mut st = QueryStats::default();
            let got = engine.query_with_stats(&q, &mut st, false).unwrap();
            if got != masks.iter().any(|&v| v & qm == 0) {
                mismatches += 1;
            }
            max_checks = max_checks.max(st.candidate_checks);
        }
        rows.push(ScalingRow {
            n,
            d,
            m,
            max_checks,
            bound,
            mismatches,
        });
    }
    rows
}

// ---------------------------------------------------------------- 4

fn criterion_partition() -> Outcome {
    let mut rng = Rand::new(0xa11ce);
    let mut violations = 0u64;
    let mut parts_seen = 0usize;
    for _ in 0..200 {
        let d = rng.range(4, 14);
        let t = rng.range(1, 4.min(d));
        let m = rng.range(1, 16);
        let n = rng.range(m, 200);
        let p = [0.5, 0.6, 0.7, 0.8, 0.9][rng.below(5) as usize];
        let x = sample_instance(n, d, p, rng.0.next_u64()).unwrap();
        let rows = row_masks(&x);
        let res = pseudorandom_partition(&x, m, t).unwrap();
        parts_seen += res.parts.len();

        // Residual has fewer than m vectors zero on every t-set.
        let residual = row_masks(&res.residual);
        for c in (0u64..1 << d).filter(|c| c.count_ones() as usize == t) {
            if residual.iter().filter(|&&v| v & c == 0).count() >= m {
                violations += 1;
            }
        }

        // Blocks: exactly m vectors, exactly t zero coordinates, all zero there.
        for part in &res.parts {
            let zero: u64 = part.zero_set.members().iter().fold(0, |a, &j| a | 1 << j);
            let block = row_masks(&part.block);
            if block.len() != m || part.indices.len() != m || part.zero_set.len() != t {
                violations += 1;
            }
            if block.iter().any(|&v| v & zero != 0) {
                violations += 1;
            }
            if part
                .indices
                .iter()
                .zip(&block)
                .any(|(&ix, &v)| rows[ix] != v)
            {
                violations += 1;
            }
        }

        // Multiset union of residual and blocks is the input.
        if res
            .residual_indices
            .iter()
            .zip(&residual)
            .any(|(&ix, &v)| rows[ix] != v)
        {
            violations += 1;
        }
        let mut all: Vec<usize> = res.residual_indices.clone();
        all.extend(res.parts.iter().flat_map(|p| p.indices.iter().copied()));
        all.sort_unstable();
        if all != (0..n).collect::<Vec<_>>() {
            violations += 1;
        }
        let mut got: Vec<u64> = residual;
        got.extend(res.parts.iter().flat_map(|p| row_masks(&p.block)));
        got.sort_unstable();
        let mut want = rows.clone();
        want.sort_unstable();
        if got != want {
            violations += 1;
        }
    }
    Outcome {
        pass: violations <= MAX_VIOLATIONS,
        detail: format!("instances=200 blocks={parts_seen} violations={violations} (tolerance {MAX_VIOLATIONS})"),
    }
}

// ---------------------------------------------------------------- 5

fn criterion_concentration() -> Outcome {
    let (n, d, p, t, m) = (1usize << 14, 24usize, 0.5, 7usize, 384usize);
    let mut events = 0u64;
    let mut max_seen = 0usize;
    let mut total = 0u64;
    for seed in 0..20u64 {
        let x = sample_instance(n, d, p, 0xc0c0_0000 + seed).unwrap();
        let rows = row_masks(&x);
        let mut rng = Rand::new(0xc0c0_1000 + seed);
        for _ in 0..1000 {
            let c: u64 = rng.distinct(d, t).into_iter().fold(0, |a, j| a | 1 << j);
            let size = rows.iter().filter(|&&v| v & c == 0).count();
            total += size as u64;
            max_seen = max_seen.max(size);
            if size >= m {
                events += 1;
            }
        }
    }
    Outcome {
        pass: events <= MAX_VIOLATIONS,
        detail: format!(
            "samples=20000 mean|Y_C|={:.1} max|Y_C|={max_seen} events(|Y_C|>={m})={events} (tolerance {MAX_VIOLATIONS})",
            total as f64 / 20000.0
        ),
    }
}

// ---------------------------------------------------------------- 6

fn satisfiable(n: usize, clauses: &[Vec<Literal>]) -> bool {
    (0..1u64 << n).any(|mu| {
        clauses
            .iter()
            .all(|c| c.iter().any(|l| (mu >> l.var & 1 == 1) == l.positive))
    })
}

fn random_clause(rng: &mut Rand, n: usize, width: usize) -> Vec<Literal> {
    let mut c: Vec<Literal> = rng
        .distinct(n, width)
        .into_iter()
        .map(|v| Literal {
            var: v,
            positive: rng.chance(1, 2),
        })
        .collect();
    c.sort();
    c
}

/// Checks one hardest instance: every vector has weight w, the dimension is
/// binom(theta, k) 2^(delta n), and each formula's verdict matches.
fn check_hardest(
    h: &HardInstance,
    formulas: &[Vec<Vec<Literal>>],
    engine: Option<&Engine>,
    tally: &mut [u64; 3],
) {
    let (n, k) = (h.n(), h.k());
    let theta = k as u64 * h.delta().den / h.delta().num;
    let w = binom(theta, k as u64) as usize;
    let dim =
        binom(theta, k as u64) as usize * (1usize << (n as u64 * h.delta().num / h.delta().den));
    if h.dim() != dim {
        tally[2] += 1;
    }
    tally[2] += h.vectors().vectors().filter(|v| v.popcount() != w).count() as u64;
    for clauses in formulas {
        let phi = Cnf::new(n, clauses.clone()).unwrap();
        let want = satisfiable(n, clauses);
        let q = encode_cnf_query(h, &phi).unwrap().vector;
        let hit = find_orthogonal(h, &q);
        // The orthogonal vector, when present, must be a satisfying assignment.
        let witness_ok = hit.is_none_or(|mu| {
            clauses
                .iter()
                .all(|c| c.iter().any(|l| (mu >> l.var & 1 == 1) == l.positive))
        });
        let mut agree = hit.is_some() == want && witness_ok && sat_oracle(&phi).unwrap() == want;
        if let Some(e) = engine {
            agree &= e.query(&q).unwrap() == want;
        }
        tally[usize::from(want)] += 1;
        if !agree {
            tally[2] += 1;
        }
    }
}

fn criterion_hardest() -> Outcome {
    let half = Delta::new(1, 2).unwrap();
    let mut rng = Rand::new(0x2c0f);
    // [unsat, sat, violations]
    let mut tally = [0u64; 3];

    let mut seen = HashSet::new();
    let mut two_cnfs = Vec::new();
    while two_cnfs.len() < 500 {
        let count = rng.range(0, 6);
        let mut f: Vec<Vec<Literal>> = (0..count)
            .map(|_| {
                let width = rng.range(1, 2);
                random_clause(&mut rng, 4, width)
            })
            .collect();
        f.sort();
        f.dedup();
        if seen.insert(f.clone()) {
            two_cnfs.push(f);
        }
    }
    let h4 = build_hardest_instance(4, 2, half).unwrap();
    let worst = EngineConfig::Worst { i: h4.dim() / 2 }
        .build(h4.vectors())
        .unwrap();
    check_hardest(&h4, &two_cnfs, Some(&worst), &mut tally);

    let three_cnfs: Vec<Vec<Vec<Literal>>> = (0..300)
        .map(|_| {
            let count = rng.range(1, 40);
            (0..count).map(|_| random_clause(&mut rng, 6, 3)).collect()
        })
        .collect();
    let h6 = build_hardest_instance(6, 3, half).unwrap();
    check_hardest(&h6, &three_cnfs, None, &mut tally);

    Outcome {
        pass: tally[2] <= MAX_VIOLATIONS && tally[0] > 0 && tally[1] > 0,
        detail: format!(
            "formulas=800 sat={} unsat={} N=(16,64) d=({},{}) violations={} (tolerance {MAX_VIOLATIONS})",
            tally[1],
            tally[0],
            h4.dim(),
            h6.dim(),
            tally[2]
        ),
    }
}

// ---------------------------------------------------------------- 7

/// Hamiltonian path by trying every vertex order.
fn hampath_by_permutation(n: usize, edges: &[(usize, usize)]) -> bool {
    let adj: HashSet<(usize, usize)> = edges.iter().copied().collect();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        if perm.windows(2).all(|w| adj.contains(&(w[0], w[1]))) {
            return true;
        }
        // Next permutation in lexicographic order.
        let Some(i) = (0..n.saturating_sub(1))
            .rev()
            .find(|&i| perm[i] < perm[i + 1])
        else {
            return false;
        };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
}

fn structured_graphs() -> Vec<Vec<(usize, usize)>> {
    let n = 6;
    let path = |order: &[usize]| order.windows(2).map(|w| (w[0], w[1])).collect::<Vec<_>>();
    let all_pairs = |keep: &dyn Fn(usize, usize) -> bool| {
        (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| u != v && keep(u, v))
            .collect::<Vec<_>>()
    };
    let mut cycle = path(&[0, 1, 2, 3, 4, 5]);
    cycle.push((5, 0));
    let rev_cycle: Vec<_> = cycle.iter().map(|&(u, v)| (v, u)).collect();
    let mut chord = cycle.clone();
    chord.push((1, 4));
    let mut two_triangles = vec![(0, 1), (1, 2), (2, 0)];
    two_triangles.extend([(3, 4), (4, 5), (5, 3)]);
    let mut undirected = path(&[0, 1, 2, 3, 4, 5]);
    undirected.extend(path(&[5, 4, 3, 2, 1, 0]));
    let mut sink_branch = path(&[0, 1, 2, 3, 4, 5]);
    sink_branch.push((2, 5));
    vec![
        path(&[0, 1, 2, 3, 4, 5]),
        path(&[5, 4, 3, 2, 1, 0]),
        path(&[3, 0, 5, 1, 4, 2]),
        cycle,
        rev_cycle,
        Vec::new(),
        all_pairs(&|_, _| true),
        all_pairs(&|_, v| v != 0),
        all_pairs(&|u, _| u == 0),
        all_pairs(&|_, v| v == 0),
        two_triangles,
        vec![(0, 1), (1, 2), (3, 2), (3, 4), (4, 5)],
        undirected,
        all_pairs(&|u, v| u < v),
        all_pairs(&|u, v| u < 3 && v >= 3),
        all_pairs(&|u, v| (u < 3) != (v < 3)),
        chord,
        path(&[0, 1, 2, 3, 4]),
        all_pairs(&|u, v| v == 5 && u != 5),
        sink_branch,
    ]
}

fn criterion_hampath() -> Outcome {
    let (n, k) = (6usize, 3usize);
    let red = hampath_reduction_build(n, k).unwrap();
    let lists = red.instance.lists();
    let mut rng = Rand::new(0x4a3b);
    let mut graphs = structured_graphs();
    for _ in 0..300 {
        let density = rng.range(15, 60) as u64;
        let edges = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| u != v)
            .filter(|_| rng.chance(density, 100))
            .collect();
        graphs.push(edges);
    }
    let mut violations = 0u64;
    let mut hamiltonian = 0u64;
    let mut queries_run = 0u64;
    for edges in &graphs {
        let g = Digraph::from_edges(n, edges).unwrap();
        let want = hampath_by_permutation(n, edges);
        hamiltonian += u64::from(want);
        let table = simple_paths_dp(&g, n / k).unwrap();
        let queries = hampath_reduction_queries(&g, &red, &table).unwrap();
        if queries.len() != n.pow(k as u32 + 1) {
            violations += 1;
        }
        let mut any = false;
        for q in &queries {
            queries_run += 1;
            let solved = ksum_query_solve(&red.instance, q).unwrap();
            // x1 + x2 = x3 over the selected entries.
            let pick = |i: usize| {
                lists[i]
                    .iter()
                    .zip(&q.masks[i])
                    .filter(|(_, &s)| s)
                    .map(|(&v, _)| v)
            };
            let brute = pick(0).any(|a| pick(1).any(|b| pick(2).any(|c| a + b == c)));
            if solved != brute {
                violations += 1;
            }
            any |= brute;
        }
        if any != want || hampath_oracle(&g) != want {
            violations += 1;
        }
    }
    Outcome {
        pass: violations <= MAX_VIOLATIONS,
        detail: format!(
            "graphs={} hamiltonian={hamiltonian} queries={queries_run} violations={violations} (tolerance {MAX_VIOLATIONS})",
            graphs.len()
        ),
    }
}

// ---------------------------------------------------------------- 8

fn adapter_engines(seed: u64) -> [EngineConfig; 3] {
    [
        EngineConfig::Oracle,
        EngineConfig::Avg(AvgThreshold::Auto {
            p: 0.5,
            eps: AVG_EPS,
        }),
        EngineConfig::Worst {
            i: 2 + (seed % 3) as usize,
        },
    ]
}

fn random_mask(rng: &mut Rand, d: usize, num: u64, den: u64) -> u64 {
    (0..d)
        .filter(|_| rng.chance(num, den))
        .fold(0, |a, j| a | 1 << j)
}

fn set_of(d: usize, mask: u64) -> CoordSet {
    CoordSet::new(d, (0..d).filter(|&j| mask >> j & 1 == 1).collect()).unwrap()
}

fn criterion_adapters() -> Outcome {
    let mut violations = 0u64;
    let mut answered = [0u64; 4];
    let mut hits = [0u64; 4];
    for seed in 0..50u64 {
        let mut rng = Rand::new(0xada0_0000 + seed);
        let engines = adapter_engines(seed);

        // Partial match: input dimension doubles, so d <= 10 keeps the oracle at 2^20.
        let d = 4 + (seed % 7) as usize;
        let n = rng.range(1, 200);
        let inputs: Vec<u64> = (0..n).map(|_| random_mask(&mut rng, d, 1, 2)).collect();
        let patterns: Vec<Vec<Option<bool>>> = (0..500)
            .map(|_| {
                let base = if rng.chance(1, 2) {
                    inputs[rng.below(n as u64) as usize]
                } else {
                    random_mask(&mut rng, d, 1, 2)
                };
                (0..d)
                    .map(|j| (!rng.chance(1, 2)).then_some(base >> j & 1 == 1))
                    .collect()
            })
            .collect();
        let truth: Vec<bool> = patterns
            .iter()
            .map(|pat| {
                inputs.iter().any(|&x| {
                    pat.iter()
                        .enumerate()
                        .all(|(j, s)| s.is_none_or(|b| (x >> j & 1 == 1) == b))
                })
            })
            .collect();
        let rows: Vec<BitVec> = inputs.iter().map(|&x| vec_of_mask(d, x)).collect();
        let pms: Vec<PMPattern> = patterns
            .iter()
            .map(|pat| {
                PMPattern::new(
                    pat.iter()
                        .map(|s| match s {
                            None => PmSymbol::Wild,
                            Some(false) => PmSymbol::Zero,
                            Some(true) => PmSymbol::One,
                        })
                        .collect(),
                )
            })
            .collect();
        for cfg in &engines {
            let idx = PartialMatchIndex::build(cfg, d, &rows).unwrap();
            for (y, &want) in pms.iter().zip(&truth) {
                answered[0] += 1;
                hits[0] += u64::from(want);
                violations += u64::from(idx.query(y).unwrap() != want);
            }
        }

        // Subset and containment on d <= 20 coordinates.
        let d = 8 + (seed % 13) as usize;
        let n = rng.range(1, 200);
        let stored: Vec<u64> = (0..n).map(|_| random_mask(&mut rng, d, 1, 2)).collect();
        let sets: Vec<CoordSet> = stored.iter().map(|&s| set_of(d, s)).collect();
        let sub_q: Vec<u64> = (0..500)
            .map(|_| {
                if rng.chance(1, 2) {
                    stored[rng.below(n as u64) as usize] & random_mask(&mut rng, d, 3, 4)
                } else {
                    random_mask(&mut rng, d, 1, 3)
                }
            })
            .collect();
        let sup_q: Vec<u64> = (0..500)
            .map(|_| {
                if rng.chance(1, 2) {
                    stored[rng.below(n as u64) as usize] | random_mask(&mut rng, d, 1, 4)
                } else {
                    random_mask(&mut rng, d, 2, 3)
                }
            })
            .collect();
        for cfg in &engines {
            let sub = SubsetIndex::build(cfg, d, &sets).unwrap();
            for &q in &sub_q {
                let want = stored.iter().any(|&s| q & !s == 0);
                answered[1] += 1;
                hits[1] += u64::from(want);
                violations += u64::from(sub.query(&set_of(d, q)).unwrap() != want);
            }
            let con = ContainmentIndex::build(cfg, d, &sets).unwrap();
            for &q in &sup_q {
                let want = stored.iter().any(|&s| s & !q == 0);
                answered[2] += 1;
                hits[2] += u64::from(want);
                violations += u64::from(con.query(&set_of(d, q)).unwrap() != want);
            }
        }

        // DNF evaluation: 2 * vars <= 20.
        let vars = 4 + (seed % 7) as usize;
        let count = rng.range(1, 200);
        let clauses: Vec<Vec<Literal>> = (0..count)
            .map(|_| {
                let width = rng.range(1, 3.min(vars));
                random_clause(&mut rng, vars, width)
            })
            .collect();
        let phi = DNFFormula::new(vars, clauses.clone()).unwrap();
        let assignments: Vec<u64> = (0..500)
            .map(|_| random_mask(&mut rng, vars, 1, 2))
            .collect();
        for cfg in &engines {
            let eval = DnfEvaluator::build(cfg, &phi).unwrap();
            for &a in &assignments {
                let want = clauses
                    .iter()
                    .any(|c| c.iter().all(|l| (a >> l.var & 1 == 1) == l.positive));
                answered[3] += 1;
                hits[3] += u64::from(want);
                violations += u64::from(eval.evaluate(&vec_of_mask(vars, a)).unwrap() != want);
            }
        }
    }
    Outcome {
        pass: violations <= MAX_VIOLATIONS,
        detail: format!(
            "answers pm={}/{} subset={}/{} containment={}/{} dnf={}/{} (true/total) violations={violations} (tolerance {MAX_VIOLATIONS})",
            hits[0], answered[0], hits[1], answered[1], hits[2], answered[2], hits[3], answered[3]
        ),
    }
}

// ---------------------------------------------------------------- 9

fn criterion_serialization() -> Outcome {
    let shapes: [(usize, usize, f64, u64); 7] = [
        (1, 1, 0.5, 1),
        (2, 4, 0.25, 2),
        (17, 8, 0.5, 3),
        (64, 12, 0.75, 4),
        (200, 10, 0.5, 5),
        (120, 12, 0.9, 6),
        (33, 7, 0.6, 7),
    ];
    let mut fixtures = 0u64;
    let mut failures = 0u64;
    for (n, d, p, seed) in shapes {
        let x = sample_instance(n, d, p, seed).unwrap();
        fixtures += 2;
        failures += u64::from(
            instance_from_bytes(instance_to_text(&x).as_bytes())
                .ok()
                .as_ref()
                != Some(&x),
        );
        failures +=
            u64::from(instance_from_bytes(&instance_to_binary(&x)).ok().as_ref() != Some(&x));

        let mut builds: Vec<(EngineConfig, ContainerParams)> =
            vec![(EngineConfig::Oracle, ContainerParams::default())];
        for t in [1, 3, d] {
            let t = t.min(d);
            builds.push((
                EngineConfig::Avg(AvgThreshold::Fixed(t)),
                ContainerParams {
                    t: t as u32,
                    ..Default::default()
                },
            ));
        }
        builds.push((
            EngineConfig::Avg(AvgThreshold::Auto { p, eps: AVG_EPS }),
            ContainerParams {
                t: EngineConfig::resolve_avg_t(AvgThreshold::Auto { p, eps: AVG_EPS }, n, d)
                    .unwrap() as u32,
                p_eps: Some((p, AVG_EPS)),
                ..Default::default()
            },
        ));
        for i in 1..=d.min(4) {
            builds.push((
                EngineConfig::Worst { i },
                ContainerParams {
                    i: i as u32,
                    ..Default::default()
                },
            ));
        }
        for (cfg, params) in builds {
            fixtures += 1;
            let engine = cfg.build(&x).unwrap();
            let bytes = encode_structure(&engine, &params).unwrap();
            let Ok((back, back_params)) = decode_structure(&bytes) else {
                failures += 1;
                continue;
            };
            let again = encode_structure(&back, &back_params).unwrap();
            let same_answers = (0..1u64 << d).all(|q| {
                let q = vec_of_mask(d, q);
                engine.query(&q).unwrap() == back.query(&q).unwrap()
            });
            if again != bytes || back_params != params || !same_answers {
                failures += 1;
            }
        }
    }
    Outcome {
        pass: failures == 0,
        detail: format!(
            "fixtures={fixtures} round-tripped={} (tolerance: all)",
            fixtures - failures
        ),
    }
}

// ---------------------------------------------------------------- driver

fn main() -> ExitCode {
    // `cargo test -- --list` and similar probes pass flags; answer them quietly.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let mut all_pass = true;
    let mut record = |id: u32, name: &str, start: Instant, o: Outcome| {
        report(id, name, start, &o);
        all_pass &= o.pass;
    };

    let start = Instant::now();
    let s = sweep();
    record(
        1,
        "oracle equivalence",
        start,
        Outcome {
            pass: s.mismatches <= MAX_VIOLATIONS,
            detail: format!(
                "instances={} builds={} queries={} mismatches={} (tolerance {MAX_VIOLATIONS})",
                s.instances, s.builds, s.queries, s.mismatches
            ),
        },
    );
    record(
        2,
        "worst-case space bound",
        start,
        Outcome {
            pass: s.space_violations <= MAX_VIOLATIONS,
            detail: format!(
                "structures={} violations={} (tolerance {MAX_VIOLATIONS})",
                s.worst_builds, s.space_violations
            ),
        },
    );

    let start3 = Instant::now();
    let rows = scaling_table();
    let mut scaling_ok = rows
        .iter()
        .all(|r| r.max_checks <= r.bound && r.mismatches == 0);
    let mut table = String::new();
    for (k, r) in rows.iter().enumerate() {
        table += &format!("n={} d={} max={} bound={}", r.n, r.d, r.max_checks, r.bound);
        if k > 0 {
            let prev = &rows[k - 1];
            let expected = r.m as f64 / prev.m as f64;
            let observed = if prev.max_checks == 0 {
                f64::INFINITY
            } else {
                r.max_checks as f64 / prev.max_checks as f64
            };
            scaling_ok &=
                observed >= expected / SCALING_FACTOR && observed <= expected * SCALING_FACTOR;
            table += &format!(" growth={observed:.2} vs {expected:.2}");
        }
        table += "; ";
    }
    record(
        3,
        "worst-case query bound",
        start3,
        Outcome {
            pass: s.query_violations <= MAX_VIOLATIONS && scaling_ok,
            detail: format!(
                "queries={} violations={} (tolerance {MAX_VIOLATIONS}); {table}factor {SCALING_FACTOR}",
                s.queries, s.query_violations
            ),
        },
    );

    record(4, "partition invariants", Instant::now(), criterion_partition());
    let start = Instant::now();
    record(
        5,
        "average-case concentration",
        start,
        criterion_concentration(),
    );
    let start = Instant::now();
    record(
        6,
        "hardest-instance equivalence",
        start,
        criterion_hardest(),
    );
    let start = Instant::now();
    record(7, "hampath reduction", start, criterion_hampath());
    let start = Instant::now();
    record(8, "reduction adapters", start, criterion_adapters());
    let start = Instant::now();
    record(9, "serialization", start, criterion_serialization());

    if all_pass {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
