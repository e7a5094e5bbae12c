//! Encoders that answer Partial Match, Subset Query, Containment Query and
//! DNF evaluation with one OnlineOV structure.
//!
//! Each problem maps inputs and queries to bit vectors such that the answer is
//! "some encoded input is orthogonal to the encoded query". The adapters are
//! generic over [`BuildOnlineOv`], so any engine can sit underneath.

use std::fmt;
use std::str::FromStr;

use crate::bits::{BitVec, CoordSet};
use crate::engine::{BuildOnlineOv, OnlineOv};
use crate::error::{check_dim, contract, Error, Result};
use crate::instance::OVInstance;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum PmSymbol {
    Zero,
    One,
    Wild,
}

impl PmSymbol {
    /// Two-bit code used by the packed format.
    pub fn code(self) -> u8 {
        match self {
            PmSymbol::Zero => 0b00,
            PmSymbol::One => 0b01,
            PmSymbol::Wild => 0b10,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0b00 => Ok(PmSymbol::Zero),
            0b01 => Ok(PmSymbol::One),
            0b10 => Ok(PmSymbol::Wild),
            _ => Err(Error::Format(format!(
                "invalid pattern symbol code {code:#04b}"
            ))),
        }
    }
}

/// A partial-match query over `{0, 1, *}`.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct PMPattern {
    symbols: Vec<PmSymbol>,
}

impl PMPattern {
    pub fn new(symbols: Vec<PmSymbol>) -> Self {
        PMPattern { symbols }
    }

    pub fn dim(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[PmSymbol] {
        &self.symbols
    }

    pub fn matches(&self, x: &BitVec) -> Result<bool> {
        check_dim(self.dim(), x.dim())?;
        Ok(self.symbols.iter().enumerate().all(|(j, s)| match s {
            PmSymbol::Zero => !x.get(j),
            PmSymbol::One => x.get(j),
            PmSymbol::Wild => true,
        }))
    }

    /// Symbols packed four to a byte, symbol 0 in the low two bits.
    pub fn to_codes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.symbols.len().div_ceil(4)];
        for (j, s) in self.symbols.iter().enumerate() {
            out[j / 4] |= s.code() << (2 * (j % 4));
        }
        out
    }

    pub fn from_codes(dim: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != dim.div_ceil(4) {
            return Err(Error::Format(format!(
                "{} bytes cannot hold exactly {dim} pattern symbols",
                bytes.len()
            )));
        }
        let symbols = (0..dim)
            .map(|j| PmSymbol::from_code((bytes[j / 4] >> (2 * (j % 4))) & 0b11))
            .collect::<Result<Vec<_>>>()?;
        let tail = dim % 4;
        if tail != 0 && bytes[dim / 4] >> (2 * tail) != 0 {
            return Err(Error::Format("nonzero padding after last symbol".into()));
        }
        Ok(PMPattern { symbols })
    }
}

impl FromStr for PMPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .chars()
            .enumerate()
            .map(|(col, c)| match c {
                '0' => Ok(PmSymbol::Zero),
                '1' => Ok(PmSymbol::One),
                '*' => Ok(PmSymbol::Wild),
                other => Err(Error::Format(format!(
                    "pattern column {}: expected 0, 1 or *, found {other:?}",
                    col + 1
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PMPattern { symbols })
    }
}

impl fmt::Display for PMPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            f.write_str(match s {
                PmSymbol::Zero => "0",
                PmSymbol::One => "1",
                PmSymbol::Wild => "*",
            })?;
        }
        Ok(())
    }
}

/// `x[j]` becomes the pair `(x[j], 1 - x[j])` at coordinates `(2j, 2j + 1)`.
pub fn pm_encode_input(x: &BitVec) -> BitVec {
    let mut out = BitVec::zeros(2 * x.dim());
    for j in 0..x.dim() {
        out.set(2 * j + usize::from(!x.get(j)), true);
    }
    out
}

/// `0 -> (1, 0)`, `1 -> (0, 1)`, `* -> (0, 0)`.
pub fn pm_encode_query(y: &PMPattern) -> BitVec {
    let mut out = BitVec::zeros(2 * y.dim());
    for (j, s) in y.symbols.iter().enumerate() {
        match s {
            PmSymbol::Zero => out.set(2 * j, true),
            PmSymbol::One => out.set(2 * j + 1, true),
            PmSymbol::Wild => {}
        }
    }
    out
}

/// Indicator of the complement: `q` is a subset of `S` iff `q` misses it.
pub fn subset_encode_input(s: &CoordSet) -> BitVec {
    s.complement().indicator()
}

pub fn subset_encode_query(q: &CoordSet) -> BitVec {
    q.indicator()
}

pub fn containment_encode_input(s: &CoordSet) -> BitVec {
    s.indicator()
}

/// Indicator of the complement: `S` is inside `q` iff `S` misses it.
pub fn containment_encode_query(q: &CoordSet) -> BitVec {
    q.complement().indicator()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal {
            var,
            positive: true,
        }
    }

    pub fn neg(var: usize) -> Self {
        Literal {
            var,
            positive: false,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "x{}", self.var)
        } else {
            write!(f, "!x{}", self.var)
        }
    }
}

/// A disjunction of conjunctive clauses over `var_count` variables.
///
/// Text form: one clause per line, literals separated by whitespace, written
/// `x3` or `!x3`; blank lines and lines starting with `#` are skipped.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DNFFormula {
    var_count: usize,
    clauses: Vec<Vec<Literal>>,
}

impl DNFFormula {
    /// Literals in a clause are sorted and deduplicated. A clause holding both
    /// polarities of a variable is rejected.
    pub fn new(var_count: usize, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        let mut out = Vec::with_capacity(clauses.len());
        for (c, mut clause) in clauses.into_iter().enumerate() {
            if clause.is_empty() {
                return Err(contract(format!("clause {c} is empty")));
            }
            clause.sort();
            clause.dedup();
            for lit in &clause {
                if lit.var >= var_count {
                    return Err(contract(format!(
                        "clause {c}: variable {} out of range for {var_count} variables",
                        lit.var
                    )));
                }
            }
            if let Some(w) = clause.windows(2).find(|w| w[0].var == w[1].var) {
                return Err(contract(format!(
                    "clause {c} is contradictory: contains both x{0} and !x{0}",
                    w[0].var
                )));
            }
            out.push(clause);
        }
        Ok(DNFFormula {
            var_count,
            clauses: out,
        })
    }

    pub fn parse(var_count: usize, text: &str) -> Result<Self> {
        let mut clauses = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let clause = line
                .split_whitespace()
                .map(|tok| {
                    parse_literal(tok).ok_or_else(|| {
                        Error::Format(format!("line {}: bad literal {tok:?}", line_no + 1))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            clauses.push(clause);
        }
        DNFFormula::new(var_count, clauses)
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    pub fn evaluate(&self, a: &BitVec) -> Result<bool> {
        check_dim(self.var_count, a.dim())?;
        Ok(self
            .clauses
            .iter()
            .any(|c| c.iter().all(|l| a.get(l.var) == l.positive)))
    }
}

fn parse_literal(tok: &str) -> Option<Literal> {
    let (positive, rest) = match tok.strip_prefix('!') {
        Some(rest) => (false, rest),
        None => (true, tok),
    };
    let var = rest.strip_prefix('x')?.parse().ok()?;
    Some(Literal { var, positive })
}

/// Clause vector: bit `2j` for a literal `x_j`, bit `2j + 1` for `!x_j`.
pub fn dnf_encode_clause(var_count: usize, clause: &[Literal]) -> BitVec {
    let mut v = BitVec::zeros(2 * var_count);
    for lit in clause {
        v.set(2 * lit.var + usize::from(!lit.positive), true);
    }
    v
}

pub fn dnf_encode(phi: &DNFFormula) -> Result<OVInstance> {
    let mut x = OVInstance::empty(2 * phi.var_count);
    for clause in &phi.clauses {
        x.push(&dnf_encode_clause(phi.var_count, clause))?;
    }
    Ok(x)
}

/// Bit `2j` set iff `a_j = 0` (falsifies `x_j`), bit `2j + 1` iff `a_j = 1`.
pub fn dnf_encode_assignment(a: &BitVec) -> BitVec {
    let mut out = BitVec::zeros(2 * a.dim());
    for j in 0..a.dim() {
        out.set(2 * j + usize::from(a.get(j)), true);
    }
    out
}

fn build_encoded<B: BuildOnlineOv>(
    builder: &B,
    dim: usize,
    rows: impl Iterator<Item = BitVec>,
) -> Result<B::Output> {
    let mut x = OVInstance::empty(dim);
    for v in rows {
        x.push(&v)?;
    }
    builder.build(&x)
}

/// Partial-match index: does any stored string match the pattern?
pub struct PartialMatchIndex<S> {
    dim: usize,
    inner: S,
}

impl<S: OnlineOv> PartialMatchIndex<S> {
    pub fn build<B: BuildOnlineOv<Output = S>>(
        builder: &B,
        dim: usize,
        inputs: &[BitVec],
    ) -> Result<Self> {
        for x in inputs {
            check_dim(dim, x.dim())?;
        }
        let inner = build_encoded(builder, 2 * dim, inputs.iter().map(pm_encode_input))?;
        Ok(PartialMatchIndex { dim, inner })
    }

    pub fn query(&self, y: &PMPattern) -> Result<bool> {
        check_dim(self.dim, y.dim())?;
        self.inner.query(&pm_encode_query(y))
    }

    pub fn inner(&self) -> &S {
        &self.inner
    }
}

/// Subset-query index: is the query contained in some stored set?
pub struct SubsetIndex<S> {
    dim: usize,
    inner: S,
}

impl<S: OnlineOv> SubsetIndex<S> {
    pub fn build<B: BuildOnlineOv<Output = S>>(
        builder: &B,
        dim: usize,
        inputs: &[CoordSet],
    ) -> Result<Self> {
        for s in inputs {
            check_dim(dim, s.dim())?;
        }
        let inner = build_encoded(builder, dim, inputs.iter().map(subset_encode_input))?;
        Ok(SubsetIndex { dim, inner })
    }

    pub fn query(&self, q: &CoordSet) -> Result<bool> {
        check_dim(self.dim, q.dim())?;
        self.inner.query(&subset_encode_query(q))
    }
}

/// Containment-query index: is some stored set contained in the query?
pub struct ContainmentIndex<S> {
    dim: usize,
    inner: S,
}

impl<S: OnlineOv> ContainmentIndex<S> {
    pub fn build<B: BuildOnlineOv<Output = S>>(
        builder: &B,
        dim: usize,
        inputs: &[CoordSet],
    ) -> Result<Self> {
        for s in inputs {
            check_dim(dim, s.dim())?;
        }
        let inner = build_encoded(builder, dim, inputs.iter().map(containment_encode_input))?;
        Ok(ContainmentIndex { dim, inner })
    }

    pub fn query(&self, q: &CoordSet) -> Result<bool> {
        check_dim(self.dim, q.dim())?;
        self.inner.query(&containment_encode_query(q))
    }
}

/// Preprocessed DNF formula, evaluated on assignments.
pub struct DnfEvaluator<S> {
    var_count: usize,
    inner: S,
}

impl<S: OnlineOv> DnfEvaluator<S> {
    pub fn build<B: BuildOnlineOv<Output = S>>(builder: &B, phi: &DNFFormula) -> Result<Self> {
        if phi.clauses.is_empty() {
            return Err(contract("cannot preprocess a formula with no clauses"));
        }
        Ok(DnfEvaluator {
            var_count: phi.var_count,
            inner: builder.build(&dnf_encode(phi)?)?,
        })
    }

    pub fn evaluate(&self, a: &BitVec) -> Result<bool> {
        check_dim(self.var_count, a.dim())?;
        self.inner.query(&dnf_encode_assignment(a))
    }
}
