//! k-CNF formulas, a DIMACS reader and an enumeration SAT check.

use crate::error::{contract, Error, Result};
use crate::reductions::Literal;

/// Largest variable count [`sat_oracle`] will enumerate.
pub const SAT_ORACLE_MAX_VARS: usize = 24;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cnf {
    var_count: usize,
    clauses: Vec<Vec<Literal>>,
}

impl Cnf {
    pub fn new(var_count: usize, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        for (c, clause) in clauses.iter().enumerate() {
            if let Some(l) = clause.iter().find(|l| l.var >= var_count) {
                return Err(contract(format!(
                    "clause {c}: variable {} out of range for {var_count} variables",
                    l.var
                )));
            }
        }
        Ok(Cnf { var_count, clauses })
    }

    /// DIMACS: optional `c` comment lines, a `p cnf <vars> <clauses>` header,
    /// then 1-based signed literals with each clause closed by `0`.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            let bad = |what: &str| Error::Format(format!("line {}: {what}", line_no + 1));
            if line.starts_with('p') {
                let f: Vec<&str> = line.split_whitespace().collect();
                if f.len() != 4 || f[1] != "cnf" || header.is_some() {
                    return Err(bad("expected a single `p cnf <vars> <clauses>` header"));
                }
                let vars = f[2].parse().map_err(|_| bad("bad variable count"))?;
                let count = f[3].parse().map_err(|_| bad("bad clause count"))?;
                header = Some((vars, count));
                continue;
            }
            let (vars, _) = header.ok_or_else(|| bad("clause before the `p cnf` header"))?;
            for tok in line.split_whitespace() {
                let lit: i64 = tok
                    .parse()
                    .map_err(|_| bad(&format!("bad literal {tok:?}")))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                    continue;
                }
                let var = lit.unsigned_abs() as usize - 1;
                if var >= vars {
                    return Err(bad(&format!("literal {lit} exceeds {vars} variables")));
                }
                current.push(Literal {
                    var,
                    positive: lit > 0,
                });
            }
        }
        let (vars, count) = header.ok_or_else(|| Error::Format("missing `p cnf` header".into()))?;
        if !current.is_empty() {
            return Err(Error::Format("last clause is not terminated by 0".into()));
        }
        if clauses.len() != count {
            return Err(Error::Format(format!(
                "header announces {count} clauses, found {}",
                clauses.len()
            )));
        }
        Cnf::new(vars, clauses)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.var_count, self.clauses.len());
        for clause in &self.clauses {
            for l in clause {
                let v = l.var as i64 + 1;
                out += &format!("{} ", if l.positive { v } else { -v });
            }
            out += "0\n";
        }
        out
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    /// Largest number of distinct variables in one clause.
    pub fn width(&self) -> usize {
        self.clauses
            .iter()
            .map(|c| {
                let mut vars: Vec<usize> = c.iter().map(|l| l.var).collect();
                vars.sort_unstable();
                vars.dedup();
                vars.len()
            })
            .max()
            .unwrap_or(0)
    }

    /// Clause as (positive mask, negative mask) over variables.
    pub(crate) fn clause_masks(clause: &[Literal]) -> (u64, u64) {
        clause.iter().fold((0, 0), |(p, n), l| {
            if l.positive {
                (p | 1 << l.var, n)
            } else {
                (p, n | 1 << l.var)
            }
        })
    }

    /// Does the assignment (variable `j` at bit `j`) satisfy every clause?
    pub fn satisfied_by(&self, assignment: u64) -> bool {
        self.clauses.iter().all(|c| {
            let (p, n) = Cnf::clause_masks(c);
            assignment & p != 0 || !assignment & n != 0
        })
    }
}

/// Satisfiability by enumerating all `2^n` assignments.
pub fn sat_oracle(phi: &Cnf) -> Result<bool> {
    if phi.var_count > SAT_ORACLE_MAX_VARS {
        return Err(contract(format!(
            "sat_oracle enumerates at most {SAT_ORACLE_MAX_VARS} variables, got {}",
            phi.var_count
        )));
    }
    let masks: Vec<(u64, u64)> = phi.clauses.iter().map(|c| Cnf::clause_masks(c)).collect();
    Ok((0..1u64 << phi.var_count).any(|a| masks.iter().all(|&(p, n)| a & p != 0 || !a & n != 0)))
}
