//! 3-CNF formulas: DIMACS I/O, occurrence normalization and a brute-force
//! satisfiability oracle.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// A literal: `+v` or `-v` for a variable `v >= 1`.
pub type Lit = i32;

/// Default variable limit of [`sat_bruteforce`].
pub const DEFAULT_SAT_VAR_LIMIT: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    num_vars: u32,
    clauses: Vec<Vec<Lit>>,
}

impl CnfFormula {
    /// Builds a formula, deduplicating literals inside each clause.
    ///
    /// Clauses may hold one to three literals (the empty clause is allowed
    /// and makes the formula unsatisfiable). Tautological clauses and
    /// out-of-range variables are rejected.
    pub fn new(num_vars: u32, clauses: Vec<Vec<Lit>>) -> Result<Self> {
        let mut out = Vec::with_capacity(clauses.len());
        for (ci, clause) in clauses.into_iter().enumerate() {
            out.push(
                normalize_clause(num_vars, clause)
                    .map_err(|m| Error::precondition(format!("clause {ci}: {m}")))?,
            );
        }
        Ok(CnfFormula {
            num_vars,
            clauses: out,
        })
    }

    #[inline]
    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    #[inline]
    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    #[inline]
    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    /// Number of clauses each variable occurs in, indexed by `var - 1`.
    pub fn occurrences(&self) -> Vec<usize> {
        let mut occ = vec![0usize; self.num_vars as usize];
        for clause in &self.clauses {
            for &lit in clause {
                occ[lit.unsigned_abs() as usize - 1] += 1;
            }
        }
        occ
    }

    /// Every variable occurs in at most three clauses.
    pub fn is_normalized(&self) -> bool {
        self.occurrences().iter().all(|&c| c <= 3)
    }

    /// Evaluates the formula; `assignment[v - 1]` is the value of `v`.
    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| clause_satisfied(c, assignment))
    }

    /// Canonical DIMACS text. `parse_dimacs(f.to_dimacs()) == f`.
    pub fn to_dimacs(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "p cnf {} {}", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                let _ = write!(s, "{lit} ");
            }
            s.push_str("0\n");
        }
        s
    }
}

pub(crate) fn clause_satisfied(clause: &[Lit], assignment: &[bool]) -> bool {
    clause
        .iter()
        .any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0))
}

fn normalize_clause(num_vars: u32, clause: Vec<Lit>) -> std::result::Result<Vec<Lit>, String> {
    let mut out: Vec<Lit> = Vec::with_capacity(3);
    for lit in clause {
        if lit == 0 {
            return Err("literal 0 inside clause".into());
        }
        if lit.unsigned_abs() > num_vars {
            return Err(format!(
                "variable {} out of range 1..={num_vars}",
                lit.unsigned_abs()
            ));
        }
        if out.contains(&-lit) {
            return Err(format!(
                "clause contains both {} and {}",
                lit.abs(),
                -lit.abs()
            ));
        }
        if !out.contains(&lit) {
            out.push(lit);
        }
    }
    if out.len() > 3 {
        return Err(format!(
            "clause has {} literals, at most 3 allowed",
            out.len()
        ));
    }
    Ok(out)
}

/// Parses DIMACS CNF. Comment lines start with `c`; a `%` line ends input.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::parse(line_no, "duplicate header"));
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 4 || toks[0] != "p" || toks[1] != "cnf" {
                return Err(Error::parse(line_no, "expected `p cnf <vars> <clauses>`"));
            }
            let n = toks[2]
                .parse::<u32>()
                .map_err(|_| Error::parse(line_no, "bad variable count"))?;
            let m = toks[3]
                .parse::<usize>()
                .map_err(|_| Error::parse(line_no, "bad clause count"))?;
            if n > i32::MAX as u32 {
                return Err(Error::parse(line_no, "variable count too large"));
            }
            header = Some((n, m));
            continue;
        }
        let Some((n, _)) = header else {
            return Err(Error::parse(line_no, "clause before header"));
        };
        for tok in line.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad literal `{tok}`")))?;
            if lit == 0 {
                let clause = normalize_clause(n, std::mem::take(&mut current))
                    .map_err(|m| Error::parse(line_no, m))?;
                clauses.push(clause);
                continue;
            }
            if lit.unsigned_abs() > u64::from(n) {
                return Err(Error::parse(
                    line_no,
                    format!("variable {} out of range 1..={n}", lit.unsigned_abs()),
                ));
            }
            current.push(lit as Lit);
            if current.len() > 3 && normalize_clause(n, current.clone()).is_err() {
                return Err(Error::parse(line_no, "clause longer than 3 literals"));
            }
        }
    }
    let Some((n, m)) = header else {
        return Err(Error::parse(last_line.max(1), "missing `p cnf` header"));
    };
    if !current.is_empty() {
        return Err(Error::parse(last_line, "unterminated clause (missing 0)"));
    }
    if clauses.len() != m {
        return Err(Error::parse(
            last_line.max(1),
            format!("header declares {m} clauses, found {}", clauses.len()),
        ));
    }
    Ok(CnfFormula {
        num_vars: n,
        clauses,
    })
}

/// Rewrites `f` so every variable occurs in at most three clauses.
///
/// A variable with `c > 3` occurrences is replaced by `c` fresh copies, one
/// per occurrence (in clause order), tied together by the implication
/// cycle `(!x_i | x_{i+1 mod c})`. Each copy then occurs exactly three
/// times. The original variable keeps its index but no longer occurs.
/// The result has at most `3m + n` variables and is equisatisfiable.
pub fn tovey_normalize(f: &CnfFormula) -> CnfFormula {
    let occ = f.occurrences();
    if occ.iter().all(|&c| c <= 3) {
        return f.clone();
    }
    let mut next_var = f.num_vars;
    // original var -> (first fresh index, copies used so far)
    let mut copies: BTreeMap<u32, (u32, u32)> = BTreeMap::new();
    for (i, &c) in occ.iter().enumerate() {
        if c > 3 {
            copies.insert(i as u32 + 1, (next_var + 1, 0));
            next_var += c as u32;
        }
    }
    let mut clauses: Vec<Vec<Lit>> = f
        .clauses
        .iter()
        .map(|clause| {
            clause
                .iter()
                .map(|&lit| match copies.get_mut(&lit.unsigned_abs()) {
                    Some((base, used)) => {
                        let fresh = (*base + *used) as Lit;
                        *used += 1;
                        if lit > 0 {
                            fresh
                        } else {
                            -fresh
                        }
                    }
                    None => lit,
                })
                .collect()
        })
        .collect();
    for (&var, &(base, used)) in &copies {
        debug_assert_eq!(used as usize, occ[var as usize - 1]);
        for i in 0..used {
            let this = (base + i) as Lit;
            let next = (base + (i + 1) % used) as Lit;
            clauses.push(vec![-this, next]);
        }
    }
    CnfFormula {
        num_vars: next_var,
        clauses,
    }
}

/// Brute-force satisfiability with the default variable limit.
pub fn sat_bruteforce(f: &CnfFormula) -> Result<Option<Vec<bool>>> {
    sat_bruteforce_with_limit(f, DEFAULT_SAT_VAR_LIMIT)
}

/// Returns the first model in counting order, where the assignment is read
/// as a binary number with `x1` as the least significant bit.
pub fn sat_bruteforce_with_limit(f: &CnfFormula, limit: u32) -> Result<Option<Vec<bool>>> {
    let n = f.num_vars;
    if n > limit || n > 63 {
        return Err(Error::budget(
            "sat_bruteforce variables",
            n.into(),
            limit.into(),
        ));
    }
    let masks: Vec<(u64, u64)> = f
        .clauses
        .iter()
        .map(|c| {
            c.iter().fold((0u64, 0u64), |(pos, neg), &l| {
                let bit = 1u64 << (l.unsigned_abs() - 1);
                if l > 0 {
                    (pos | bit, neg)
                } else {
                    (pos, neg | bit)
                }
            })
        })
        .collect();
    for a in 0u64..(1u64 << n) {
        if masks
            .iter()
            .all(|&(pos, neg)| a & pos != 0 || !a & neg != 0)
        {
            return Ok(Some((0..n).map(|i| a >> i & 1 == 1).collect()));
        }
    }
    Ok(None)
}

/// Random formula with clause widths drawn from `widths` and every variable
/// used in at most three clauses. Stops early if variables run out.
pub fn random_normalized_cnf<R: Rng + ?Sized>(
    num_vars: u32,
    num_clauses: usize,
    widths: &[usize],
    rng: &mut R,
) -> CnfFormula {
    let mut remaining = vec![3u8; num_vars as usize];
    let mut clauses = Vec::with_capacity(num_clauses);
    for _ in 0..num_clauses {
        let w = *widths.choose(rng).unwrap_or(&3);
        let mut avail: Vec<u32> = (1..=num_vars)
            .filter(|&v| remaining[v as usize - 1] > 0)
            .collect();
        if avail.len() < w.max(1) {
            break;
        }
        avail.shuffle(rng);
        let clause: Vec<Lit> = avail[..w]
            .iter()
            .map(|&v| {
                remaining[v as usize - 1] -= 1;
                if rng.gen_bool(0.5) {
                    v as Lit
                } else {
                    -(v as Lit)
                }
            })
            .collect();
        clauses.push(clause);
    }
    CnfFormula { num_vars, clauses }
}

/// Uniform random 3-CNF without occurrence restrictions.
pub fn random_3cnf<R: Rng + ?Sized>(num_vars: u32, num_clauses: usize, rng: &mut R) -> CnfFormula {
    let vars: Vec<u32> = (1..=num_vars).collect();
    let clauses = (0..num_clauses)
        .map(|_| {
            vars.choose_multiple(rng, 3.min(vars.len()))
                .map(|&v| {
                    if rng.gen_bool(0.5) {
                        v as Lit
                    } else {
                        -(v as Lit)
                    }
                })
                .collect()
        })
        .collect();
    CnfFormula { num_vars, clauses }
}
