//! `oov`: generate instances, build and query structures, verify them against
//! the linear scan, benchmark them, and run the hardness constructions.
//!
//! Exit status: 0 on success or agreement, 1 on a verification mismatch, 2 on
//! a usage or contract error.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use oov_core::avgcase::choose_t_avg;
use oov_core::bits::{BitVec, CoordSet};
use oov_core::codec::{
    decode_structure, encode_structure, instance_from_bytes, instance_to_binary, instance_to_text,
    ContainerParams,
};
use oov_core::combinatorics::binom_leq;
use oov_core::engine::{AvgThreshold, BuildOnlineOv, Engine, EngineConfig, OnlineOv, QueryStats};
use oov_core::hardness::{
    build_hardest_instance, encode_cnf_query, find_orthogonal, hampath_oracle,
    hampath_reduction_build, hampath_via_ksum, sat_oracle, Cnf, Delta, Digraph,
};
use oov_core::instance::{sample_instance, OVInstance};
use oov_core::oracle::linear_scan_query;
use oov_core::reductions::{
    ContainmentIndex, DNFFormula, DnfEvaluator, PMPattern, PartialMatchIndex, SubsetIndex,
};
use oov_core::worstcase::{preprocessing_bound, query_bound, space_bound};

#[derive(Parser)]
#[command(name = "oov", version, about = "Online orthogonal vectors toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample an instance from the p-biased distribution.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Probability that a coordinate is zero.
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Write the packed binary variant instead of text.
        #[arg(long)]
        binary: bool,
    },
    /// Preprocess an instance into a structure container.
    Build {
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Answer a file of queries, one `0`/`1` per line.
    Query {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        /// Print operation counters to stderr.
        #[arg(long)]
        stats: bool,
        /// Keep scanning after the first orthogonal vector is found.
        #[arg(long)]
        no_shortcircuit: bool,
    },
    /// Compare an engine with the linear scan and print the bound ledger.
    Verify {
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
        mode: Mode,
        /// Number of queries in sampled mode.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Scaling table: build cost, accounted bits and candidate checks.
    Bench {
        #[command(flatten)]
        engine: EngineArgs,
        /// Comma-separated instance sizes.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        n_list: Vec<usize>,
        /// `log:C` for d = round(C log2 n), or `fixed:D`.
        #[arg(long, default_value = "log:2")]
        d_rule: String,
        /// Zero probability of the sampled instances.
        #[arg(long, default_value_t = 0.5)]
        zero_p: f64,
        #[arg(long, default_value_t = 200)]
        queries: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Build the sparse SAT instance and check a CNF against it.
    Hardest {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        delta: Delta,
        /// DIMACS formula to decide through the instance.
        #[arg(long)]
        cnf: Option<PathBuf>,
    },
    /// Decide Hamiltonian path through the kSUM reduction.
    Hampath {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    /// Partial match, subset, containment or DNF queries through an engine.
    Reduce {
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long, value_enum)]
        problem: Problem,
        /// Instance file (PM, subset, containment) or DNF clause file.
        #[arg(long)]
        input: PathBuf,
        /// Variable count for a DNF formula.
        #[arg(long)]
        vars: Option<usize>,
        #[arg(long)]
        queries: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq, Debug)]
enum EngineKind {
    Scan,
    Oracle,
    Avg,
    Worst,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq, Debug)]
enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq, Debug)]
enum Format {
    Csv,
    Table,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq, Debug)]
enum Problem {
    Pm,
    Subset,
    Containment,
    Dnf,
}

#[derive(Args, Clone, Debug)]
struct EngineArgs {
    #[arg(long, value_enum, default_value_t = EngineKind::Worst)]
    engine: EngineKind,
    /// Sparsity threshold for the avg engine.
    #[arg(long)]
    t: Option<usize>,
    /// Recursion level for the worst engine.
    #[arg(long)]
    i: Option<usize>,
    /// Zero probability used to choose t for the avg engine.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
}

/// Outcome of a failed command.
enum Failure {
    /// Exit 2.
    Usage(String),
    /// Exit 1.
    Mismatch(String),
}

impl From<oov_core::Error> for Failure {
    fn from(e: oov_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    String::from_utf8(read_file(path)?)
        .map_err(|_| usage(format!("{}: not UTF-8 text", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> CmdResult {
    fs::write(path, bytes).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_instance(path: &Path) -> Result<OVInstance, Failure> {
    instance_from_bytes(&read_file(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

impl EngineArgs {
    /// Resolve flags into a config and the parameters recorded in a container.
    fn config(&self, n: usize, d: usize) -> Result<(EngineConfig, ContainerParams), Failure> {
        let mut params = ContainerParams::default();
        let cfg = match self.engine {
            EngineKind::Scan => EngineConfig::Scan,
            EngineKind::Oracle => EngineConfig::Oracle,
            EngineKind::Avg => {
                let t = match (self.t, self.p, self.eps) {
                    (Some(t), None, None) => t,
                    (None, Some(p), Some(eps)) => {
                        params.p_eps = Some((p, eps));
                        let raw = choose_t_avg(n.max(1) as u64, p, eps)?;
                        if raw > d {
                            eprintln!("note: t = {raw} exceeds d = {d}; clamped to {d}");
                        }
                        raw.clamp(1, d.max(1))
                    }
                    (None, None, None) => {
                        params.p_eps = Some((0.5, 0.5));
                        choose_t_avg(n.max(1) as u64, 0.5, 0.5)?.clamp(1, d.max(1))
                    }
                    _ => return Err(usage("avg engine takes either --t or both --p and --eps")),
                };
                params.t = t as u32;
                EngineConfig::Avg(AvgThreshold::Fixed(t))
            }
            EngineKind::Worst => {
                let i = self.i.unwrap_or(2);
                if i == 0 {
                    return Err(usage("recursion level --i must be at least 1"));
                }
                let i = if i > d.max(1) {
                    eprintln!("note: i = {i} exceeds d = {d}; clamped to {d}");
                    d.max(1)
                } else {
                    i
                };
                params.i = i as u32;
                EngineConfig::Worst { i }
            }
        };
        Ok((cfg, params))
    }
}

fn describe(engine: &Engine, params: &ContainerParams) -> String {
    match engine {
        Engine::Scan(x) => format!("engine=scan n={} d={}", x.len(), x.dim()),
        Engine::Oracle(b) => format!("engine=oracle d={}", b.dim()),
        Engine::Avg(s) => {
            let mut out = format!("engine=avg n={} d={} t={}", s.n(), s.dim(), s.t());
            if let Some((p, eps)) = params.p_eps {
                let _ = write!(out, " p={p} eps={eps}");
            }
            out
        }
        Engine::Worst(w) => format!("engine=worst n={} d={} i={}", w.n(), w.dim(), w.level()),
    }
}

fn cmd_gen(n: usize, d: usize, p: f64, seed: u64, out: &Path, binary: bool) -> CmdResult {
    let x = sample_instance(n, d, p, seed)?;
    if binary {
        write_file(out, &instance_to_binary(&x))
    } else {
        write_file(out, instance_to_text(&x).as_bytes())
    }
}

fn cmd_build(args: &EngineArgs, instance: &Path, out: &Path) -> CmdResult {
    let x = read_instance(instance)?;
    let (cfg, params) = args.config(x.len(), x.dim())?;
    let engine = cfg.build(&x)?;
    let bytes = encode_structure(&engine, &params)?;
    write_file(out, &bytes)?;
    println!("{} bytes={}", describe(&engine, &params), bytes.len());
    Ok(())
}

fn parse_query_lines(text: &str, dim: usize) -> Result<Vec<BitVec>, Failure> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let q: BitVec = line
            .parse()
            .map_err(|e| usage(format!("query line {}: {e}", idx + 1)))?;
        if q.dim() != dim {
            return Err(usage(format!(
                "query line {}: dimension mismatch: expected {dim}, found {}",
                idx + 1,
                q.dim()
            )));
        }
        out.push(q);
    }
    Ok(out)
}

fn cmd_query(structure: &Path, queries: &Path, stats: bool, no_shortcircuit: bool) -> CmdResult {
    let (engine, _) = decode_structure(&read_file(structure)?)
        .map_err(|e| usage(format!("{}: {e}", structure.display())))?;
    let qs = parse_query_lines(&read_text(queries)?, engine.dim())?;
    let mut out = String::with_capacity(qs.len() * 2);
    let mut total = QueryStats::default();
    let mut worst = QueryStats::default();
    for q in &qs {
        let mut s = QueryStats::default();
        let hit = engine.query_with_stats(q, &mut s, !no_shortcircuit)?;
        out.push(if hit { '1' } else { '0' });
        out.push('\n');
        total.candidate_checks += s.candidate_checks;
        total.bitmap_lookups += s.bitmap_lookups;
        total.nodes_visited += s.nodes_visited;
        worst.merge_max(&s);
    }
    io::stdout()
        .write_all(out.as_bytes())
        .map_err(|e| usage(format!("stdout: {e}")))?;
    if stats {
        eprintln!(
            "queries={} candidate_checks={} max_candidate_checks={} bitmap_lookups={} nodes_visited={}",
            qs.len(),
            total.candidate_checks,
            worst.candidate_checks,
            total.bitmap_lookups,
            total.nodes_visited
        );
    }
    Ok(())
}

/// Largest dimension for exhaustive verification.
const EXHAUSTIVE_DIM_CAP: usize = 16;

struct LedgerRow {
    metric: &'static str,
    measured: String,
    bound: String,
    ok: bool,
}

fn ledger(engine: &Engine, max_checks: u64) -> Vec<LedgerRow> {
    let row = |metric, measured: u128, bound: BigUint| LedgerRow {
        metric,
        measured: measured.to_string(),
        ok: bound >= BigUint::from(measured),
        bound: bound.to_string(),
    };
    match engine {
        Engine::Scan(x) => vec![row(
            "candidate_checks",
            max_checks as u128,
            BigUint::from(x.len()),
        )],
        Engine::Oracle(b) => vec![row(
            "accounted_bits",
            b.len_bits(),
            BigUint::from(b.len_bits()),
        )],
        Engine::Avg(s) => vec![
            row(
                "accounted_bits",
                s.accounted_bits(),
                binom_leq(s.dim(), s.t()) * s.n() * s.dim(),
            ),
            row(
                "candidate_checks",
                max_checks as u128,
                BigUint::from(s.lists().max_len()),
            ),
        ],
        Engine::Worst(w) => {
            let (n, d, i) = (w.n(), w.dim(), w.level());
            vec![
                row(
                    "accounted_bits",
                    w.space_account().accounted_bits,
                    space_bound(n, d, i),
                ),
                row(
                    "candidate_checks",
                    max_checks as u128,
                    query_bound(n, d, i).into(),
                ),
                row("build_ops", w.build_ops(), preprocessing_bound(n, d, i)),
            ]
        }
    }
}

fn cmd_verify(
    args: &EngineArgs,
    instance: &Path,
    mode: Mode,
    samples: usize,
    seed: u64,
) -> CmdResult {
    let x = read_instance(instance)?;
    if x.is_empty() {
        return Err(usage("instance has no vectors"));
    }
    let d = x.dim();
    let (cfg, params) = args.config(x.len(), d)?;
    let engine = cfg.build(&x)?;
    let queries: Box<dyn Iterator<Item = BitVec>> = match mode {
        Mode::Exhaustive => {
            if d > EXHAUSTIVE_DIM_CAP {
                return Err(usage(format!(
                    "exhaustive mode needs d <= {EXHAUSTIVE_DIM_CAP}, got {d}; use --mode sampled"
                )));
            }
            Box::new((0..1u64 << d).map(move |idx| BitVec::from_index(d, idx)))
        }
        Mode::Sampled => {
            let qs = sample_instance(samples.max(1), d, 0.5, seed)?;
            Box::new((0..samples).map(move |i| qs.vector(i)))
        }
    };
    println!("{}", describe(&engine, &params));
    let mut checked = 0u64;
    let mut max_checks = 0u64;
    for q in queries {
        let want = linear_scan_query(&x, &q)?;
        let mut s = QueryStats::default();
        let got = engine.query_with_stats(&q, &mut s, false)?;
        max_checks = max_checks.max(s.candidate_checks);
        checked += 1;
        if got != want {
            return Err(Failure::Mismatch(format!(
                "mismatch at query {q}: engine={} scan={}",
                u8::from(got),
                u8::from(want)
            )));
        }
    }
    println!("queries={checked} mismatches=0");
    println!("{:<18} {:>24} {:>24} status", "metric", "measured", "bound");
    let rows = ledger(&engine, max_checks);
    for r in &rows {
        println!(
            "{:<18} {:>24} {:>24} {}",
            r.metric,
            r.measured,
            r.bound,
            if r.ok { "ok" } else { "VIOLATED" }
        );
    }
    if let Some(r) = rows.iter().find(|r| !r.ok) {
        return Err(Failure::Mismatch(format!("{} exceeds its bound", r.metric)));
    }
    Ok(())
}

/// Fixed bench header; `build_ms` is the only wall-clock column.
pub const BENCH_HEADER: &str =
    "engine,n,d,param,build_ms_nondet,accounted_bits,queries,mean_checks,max_checks,check_bound";

fn dim_for(rule: &str, n: usize) -> Result<usize, Failure> {
    let bad = || usage(format!("--d-rule {rule:?}: expected log:C or fixed:D"));
    match rule.split_once(':') {
        Some(("log", c)) => {
            let c: f64 = c.parse().map_err(|_| bad())?;
            Ok(((c * (n.max(2) as f64).log2()).round() as usize).max(1))
        }
        Some(("fixed", dv)) => dv.parse().map_err(|_| bad()),
        _ => Err(bad()),
    }
}

fn cmd_bench(
    args: &EngineArgs,
    n_list: &[usize],
    d_rule: &str,
    zero_p: f64,
    queries: usize,
    seed: u64,
    format: Format,
) -> CmdResult {
    let mut rows: Vec<Vec<String>> = Vec::new();
    for (k, &n) in n_list.iter().enumerate() {
        let d = dim_for(d_rule, n)?;
        let x = sample_instance(n, d, zero_p, seed.wrapping_add(k as u64))?;
        let (cfg, params) = args.config(n, d)?;
        let start = Instant::now();
        let engine = cfg.build(&x)?;
        let build_ms = start.elapsed().as_secs_f64() * 1e3;
        let qs = sample_instance(
            queries.max(1),
            d,
            0.5,
            seed.wrapping_add(1 << 32).wrapping_add(k as u64),
        )?;
        let mut sum = 0u64;
        let mut max = 0u64;
        for i in 0..queries {
            let mut s = QueryStats::default();
            engine.query_with_stats(&qs.vector(i), &mut s, false)?;
            sum += s.candidate_checks;
            max = max.max(s.candidate_checks);
        }
        let (param, bits, bound) = match &engine {
            Engine::Scan(_) => ("-".to_string(), (n * d) as u128, n.to_string()),
            Engine::Oracle(b) => ("-".to_string(), b.len_bits(), "0".to_string()),
            Engine::Avg(s) => (
                format!("t={}", params.t),
                s.accounted_bits(),
                s.lists().max_len().to_string(),
            ),
            Engine::Worst(w) => (
                format!("i={}", params.i),
                w.space_account().accounted_bits,
                query_bound(n as u64, d, w.level()).to_string(),
            ),
        };
        let mean = if queries == 0 {
            0.0
        } else {
            sum as f64 / queries as f64
        };
        rows.push(vec![
            args_engine_name(args),
            n.to_string(),
            d.to_string(),
            param,
            format!("{build_ms:.3}"),
            bits.to_string(),
            queries.to_string(),
            format!("{mean:.3}"),
            max.to_string(),
            bound,
        ]);
    }
    let mut out = String::new();
    match format {
        Format::Csv => {
            out += BENCH_HEADER;
            out.push('\n');
            for r in &rows {
                out += &r.join(",");
                out.push('\n');
            }
        }
        Format::Table => {
            let header: Vec<&str> = BENCH_HEADER.split(',').collect();
            let widths: Vec<usize> = (0..header.len())
                .map(|c| {
                    rows.iter()
                        .map(|r| r[c].len())
                        .chain([header[c].len()])
                        .max()
                        .unwrap()
                })
                .collect();
            let line = |cells: Vec<&str>| {
                cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            out += &line(header.clone());
            out.push('\n');
            for r in &rows {
                out += &line(r.iter().map(String::as_str).collect());
                out.push('\n');
            }
        }
    }
    io::stdout()
        .write_all(out.as_bytes())
        .map_err(|e| usage(format!("stdout: {e}")))
}

fn args_engine_name(args: &EngineArgs) -> String {
    format!("{:?}", args.engine).to_lowercase()
}

fn cmd_hardest(n: usize, k: usize, delta: Delta, cnf: Option<&Path>) -> CmdResult {
    let h = build_hardest_instance(n, k, delta)?;
    println!("N={} d={} w={}", h.count(), h.dim(), h.weight());
    let Some(path) = cnf else {
        return Ok(());
    };
    let phi = Cnf::parse_dimacs(&read_text(path)?)
        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let q = encode_cnf_query(&h, &phi)?;
    let sat = sat_oracle(&phi)?;
    let scan = find_orthogonal(&h, &q.vector).is_some();
    let i = (h.dim() / 2).max(1);
    let worst = EngineConfig::Worst { i }.build(h.vectors())?;
    let via_engine = worst.query(&q.vector)?;
    let verdict = if sat { "SAT" } else { "UNSAT" };
    if sat == scan && scan == via_engine {
        println!("{verdict} agrees");
        Ok(())
    } else {
        Err(Failure::Mismatch(format!(
            "sat_oracle={sat} scan={scan} worst(i={i})={via_engine}"
        )))
    }
}

fn cmd_hampath(graph: &Path, k: usize) -> CmdResult {
    let g = Digraph::parse_edge_list(&read_text(graph)?)
        .map_err(|e| usage(format!("{}: {e}", graph.display())))?;
    let padded = g.pad_to_multiple(k)?;
    let red = hampath_reduction_build(padded.vertex_count(), k)?;
    println!(
        "n={} padded={} k={k} N={} queries={}",
        g.vertex_count(),
        padded.vertex_count(),
        red.sets.len(),
        padded.vertex_count().pow(k as u32 + 1)
    );
    let via = hampath_via_ksum(&g, k)?;
    let oracle = hampath_oracle(&g);
    if via == oracle {
        println!("{} agrees", if oracle { "HAMPATH" } else { "NO-HAMPATH" });
        Ok(())
    } else {
        Err(Failure::Mismatch(format!(
            "reduction={via} oracle={oracle}"
        )))
    }
}

fn parse_sets(x: &OVInstance) -> Vec<CoordSet> {
    x.vectors().map(|v| CoordSet::support_of(&v)).collect()
}

fn cmd_reduce(
    args: &EngineArgs,
    problem: Problem,
    input: &Path,
    vars: Option<usize>,
    queries: &Path,
) -> CmdResult {
    let text = read_text(queries)?;
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let bad_line = |no: usize, e: String| usage(format!("query line {no}: {e}"));
    let mut answers = Vec::with_capacity(lines.len());
    match problem {
        Problem::Pm | Problem::Subset | Problem::Containment => {
            let x = read_instance(input)?;
            let d = x.dim();
            let inner_dim = if problem == Problem::Pm { 2 * d } else { d };
            let (cfg, _) = args.config(x.len(), inner_dim)?;
            match problem {
                Problem::Pm => {
                    let rows: Vec<BitVec> = x.vectors().collect();
                    let idx = PartialMatchIndex::build(&cfg, d, &rows)?;
                    for (no, l) in lines {
                        let y: PMPattern = l
                            .parse()
                            .map_err(|e: oov_core::Error| bad_line(no, e.to_string()))?;
                        answers.push(idx.query(&y).map_err(|e| bad_line(no, e.to_string()))?);
                    }
                }
                Problem::Subset | Problem::Containment => {
                    let sets = parse_sets(&x);
                    let subset = (problem == Problem::Subset)
                        .then(|| SubsetIndex::build(&cfg, d, &sets))
                        .transpose()?;
                    let contain = (problem == Problem::Containment)
                        .then(|| ContainmentIndex::build(&cfg, d, &sets))
                        .transpose()?;
                    for (no, l) in lines {
                        let v: BitVec = l
                            .parse()
                            .map_err(|e: oov_core::Error| bad_line(no, e.to_string()))?;
                        if v.dim() != d {
                            return Err(bad_line(
                                no,
                                format!("expected {d} characters, found {}", v.dim()),
                            ));
                        }
                        let q = CoordSet::support_of(&v);
                        let hit = match (&subset, &contain) {
                            (Some(s), _) => s.query(&q)?,
                            (_, Some(c)) => c.query(&q)?,
                            _ => unreachable!(),
                        };
                        answers.push(hit);
                    }
                }
                Problem::Dnf => unreachable!(),
            }
        }
        Problem::Dnf => {
            let vars = vars.ok_or_else(|| usage("--vars is required for DNF formulas"))?;
            let phi = DNFFormula::parse(vars, &read_text(input)?)
                .map_err(|e| usage(format!("{}: {e}", input.display())))?;
            let (cfg, _) = args.config(phi.clauses().len(), 2 * vars)?;
            let eval = DnfEvaluator::build(&cfg, &phi)?;
            for (no, l) in lines {
                let a: BitVec = l
                    .parse()
                    .map_err(|e: oov_core::Error| bad_line(no, e.to_string()))?;
                answers.push(eval.evaluate(&a).map_err(|e| bad_line(no, e.to_string()))?);
            }
        }
    }
    let out: String = answers
        .iter()
        .map(|&b| if b { "1\n" } else { "0\n" })
        .collect();
    io::stdout()
        .write_all(out.as_bytes())
        .map_err(|e| usage(format!("stdout: {e}")))
}

fn run(cli: Cli) -> CmdResult {
    match cli.cmd {
        Command::Gen {
            n,
            d,
            p,
            seed,
            out,
            binary,
        } => cmd_gen(n, d, p, seed, &out, binary),
        Command::Build {
            engine,
            instance,
            out,
        } => cmd_build(&engine, &instance, &out),
        Command::Query {
            structure,
            queries,
            stats,
            no_shortcircuit,
        } => cmd_query(&structure, &queries, stats, no_shortcircuit),
        Command::Verify {
            engine,
            instance,
            mode,
            samples,
            seed,
        } => cmd_verify(&engine, &instance, mode, samples, seed),
        Command::Bench {
            engine,
            n_list,
            d_rule,
            zero_p,
            queries,
            seed,
            format,
        } => cmd_bench(&engine, &n_list, &d_rule, zero_p, queries, seed, format),
        Command::Hardest { n, k, delta, cnf } => cmd_hardest(n, k, delta, cnf.as_deref()),
        Command::Hampath { graph, k } => cmd_hampath(&graph, k),
        Command::Reduce {
            engine,
            problem,
            input,
            vars,
            queries,
        } => cmd_reduce(&engine, problem, &input, vars, &queries),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(msg)) => {
            eprintln!("oov: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("oov: {msg}");
            ExitCode::from(2)
        }
    }
}
