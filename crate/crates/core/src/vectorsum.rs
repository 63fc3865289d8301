//! k-VectorSum instances and the reduction from occurrence-bounded 3SAT.
//!
//! Clauses are cut into `k` contiguous parts. Each part contributes one
//! group of vectors, one per locally satisfying assignment. A variable
//! shared by two parts gets one coordinate, a variable shared by three
//! parts gets two; the +1/-1 entries cancel exactly when the parts agree.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::ops::Range;

use crate::cnf::{CnfFormula, Lit};
use crate::error::{Error, Result};
use crate::ff::{FieldVec, PrimeField};

/// Default cap on the number of variables in one part.
pub const DEFAULT_PART_VAR_LIMIT: usize = 20;

/// Default cap on the product of group sizes searched by the solver.
pub const DEFAULT_SOLVE_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorSumInstance {
    field: PrimeField,
    d: usize,
    groups: Vec<Vec<FieldVec>>,
    target: FieldVec,
}

impl VectorSumInstance {
    pub fn new(
        field: PrimeField,
        d: usize,
        groups: Vec<Vec<FieldVec>>,
        target: FieldVec,
    ) -> Result<Self> {
        if target.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: target.len(),
            });
        }
        for v in groups.iter().flatten().chain(std::iter::once(&target)) {
            if v.field() != field {
                return Err(Error::precondition("vector over a different field"));
            }
            if v.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: v.len(),
                });
            }
        }
        Ok(VectorSumInstance {
            field,
            d,
            groups,
            target,
        })
    }

    /// Instance with the zero target.
    pub fn with_zero_target(
        field: PrimeField,
        d: usize,
        groups: Vec<Vec<FieldVec>>,
    ) -> Result<Self> {
        Self::new(field, d, groups, FieldVec::zeros(field, d))
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.groups.len()
    }

    #[inline]
    pub fn groups(&self) -> &[Vec<FieldVec>] {
        &self.groups
    }

    #[inline]
    pub fn target(&self) -> &FieldVec {
        &self.target
    }

    /// Total number of vectors, `sum |V_i|`.
    pub fn size(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    /// Whether picking `witness[i]` from group `i` hits the target.
    pub fn is_witness(&self, witness: &[usize]) -> bool {
        if witness.len() != self.k() {
            return false;
        }
        let mut sum = FieldVec::zeros(self.field, self.d);
        for (g, &i) in self.groups.iter().zip(witness) {
            match g.get(i) {
                Some(v) => sum.add_scaled(1, v),
                None => return false,
            }
        }
        sum == self.target
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("vectorsum\n");
        let _ = writeln!(s, "p {}", self.field.modulus());
        let _ = writeln!(s, "d {}", self.d);
        let _ = writeln!(s, "k {}", self.k());
        let _ = writeln!(s, "target {}", self.target);
        for g in &self.groups {
            let _ = writeln!(s, "group {}", g.len());
            for v in g {
                let _ = writeln!(s, "{v}");
            }
        }
        s
    }

    /// Parses the text produced by [`VectorSumInstance::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = LineReader::new(text);
        let inst = Self::read(&mut lines)?;
        lines.expect_end()?;
        Ok(inst)
    }

    pub(crate) fn read(lines: &mut LineReader<'_>) -> Result<Self> {
        let (n, first) = lines.next_line()?;
        if first.trim() != "vectorsum" {
            return Err(Error::parse(n, "expected `vectorsum`"));
        }
        let p = lines.keyed_number("p")?;
        let field =
            PrimeField::new(p as u32).map_err(|e| Error::parse(lines.line_no(), e.to_string()))?;
        let d = lines.keyed_number("d")? as usize;
        let k = lines.keyed_number("k")? as usize;
        let (tn, tline) = lines.next_line()?;
        let rest = tline
            .strip_prefix("target")
            .ok_or_else(|| Error::parse(tn, "expected `target`"))?;
        let target = parse_vec(field, d, rest, tn)?;
        let mut groups = Vec::with_capacity(k);
        for _ in 0..k {
            let size = lines.keyed_number("group")? as usize;
            let mut g = Vec::with_capacity(size);
            for _ in 0..size {
                let (vn, vline) = lines.next_line()?;
                g.push(parse_vec(field, d, vline, vn)?);
            }
            groups.push(g);
        }
        Self::new(field, d, groups, target)
    }
}

fn parse_vec(field: PrimeField, d: usize, text: &str, line: usize) -> Result<FieldVec> {
    let v = FieldVec::parse(field, text).map_err(|m| Error::parse(line, m))?;
    if v.len() != d {
        return Err(Error::parse(
            line,
            format!("expected {d} residues, found {}", v.len()),
        ));
    }
    Ok(v)
}

/// Sequential line access with 1-based line numbers for error messages.
pub(crate) struct LineReader<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> LineReader<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        LineReader {
            lines: text.lines().collect(),
            pos: 0,
        }
    }

    pub(crate) fn line_no(&self) -> usize {
        self.pos
    }

    pub(crate) fn next_line(&mut self) -> Result<(usize, &'a str)> {
        let line = self
            .lines
            .get(self.pos)
            .ok_or_else(|| Error::parse(self.pos + 1, "unexpected end of input"))?;
        self.pos += 1;
        Ok((self.pos, line))
    }

    pub(crate) fn peek(&self) -> Option<&'a str> {
        self.lines.get(self.pos).copied()
    }

    /// Reads a line `key <number>`.
    pub(crate) fn keyed_number(&mut self, key: &str) -> Result<u64> {
        let (n, line) = self.next_line()?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 || toks[0] != key {
            return Err(Error::parse(n, format!("expected `{key} <number>`")));
        }
        toks[1]
            .parse()
            .map_err(|_| Error::parse(n, format!("bad number `{}`", toks[1])))
    }

    /// Reads a line `key a b c ...` and returns the tokens after the key.
    pub(crate) fn keyed_tokens(&mut self, key: &str) -> Result<(usize, Vec<&'a str>)> {
        let (n, line) = self.next_line()?;
        let mut toks = line.split_whitespace();
        if toks.next() != Some(key) {
            return Err(Error::parse(n, format!("expected `{key} ...`")));
        }
        Ok((n, toks.collect()))
    }

    pub(crate) fn expect_end(&mut self) -> Result<()> {
        while let Some(line) = self.peek() {
            if !line.trim().is_empty() {
                return Err(Error::parse(self.pos + 1, "trailing content"));
            }
            self.pos += 1;
        }
        Ok(())
    }
}

/// Coordinates assigned to a variable shared between parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coord {
    /// Variable in exactly two parts.
    Single(usize),
    /// Variable in exactly three parts.
    Pair(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionLayout {
    parts: Vec<Range<usize>>,
    /// `var_parts[v - 1]`: sorted distinct parts in which `v` occurs.
    var_parts: Vec<Vec<usize>>,
    coords: Vec<Option<Coord>>,
    x_vars: Vec<u32>,
    y_vars: Vec<u32>,
    d: usize,
}

impl PartitionLayout {
    /// Clause index range of every part.
    pub fn parts(&self) -> &[Range<usize>] {
        &self.parts
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    /// Variables occurring in exactly two parts.
    pub fn x_vars(&self) -> &[u32] {
        &self.x_vars
    }

    /// Variables occurring in exactly three parts.
    pub fn y_vars(&self) -> &[u32] {
        &self.y_vars
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn coord(&self, var: u32) -> Option<Coord> {
        self.coords[var as usize - 1]
    }

    pub fn parts_of(&self, var: u32) -> &[usize] {
        &self.var_parts[var as usize - 1]
    }

    /// Sorted variables occurring in part `i`.
    pub fn part_vars(&self, f: &CnfFormula, i: usize) -> Vec<u32> {
        let mut vars: Vec<u32> = f.clauses()[self.parts[i].clone()]
            .iter()
            .flatten()
            .map(|l| l.unsigned_abs())
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    /// The gadget vector of part `i` under an assignment of its variables.
    pub fn part_vector(
        &self,
        field: PrimeField,
        i: usize,
        value: impl Fn(u32) -> bool,
        vars: &[u32],
    ) -> FieldVec {
        let minus = field.neg(1);
        let mut v = FieldVec::zeros(field, self.d);
        for &x in vars {
            if !value(x) {
                continue;
            }
            let parts = self.parts_of(x);
            let rank = parts.iter().position(|&j| j == i);
            match (self.coord(x), rank) {
                (Some(Coord::Single(c)), Some(0)) => v.set(c, 1),
                (Some(Coord::Single(c)), Some(1)) => v.set(c, minus),
                (Some(Coord::Pair(c1, c2)), Some(0)) => {
                    v.set(c1, 1);
                    v.set(c2, 1);
                }
                (Some(Coord::Pair(c1, _)), Some(1)) => v.set(c1, minus),
                (Some(Coord::Pair(_, c2)), Some(2)) => v.set(c2, minus),
                _ => {}
            }
        }
        v
    }
}

/// Splits the clauses into `k` contiguous parts of sizes `ceil(m/k)` then
/// `floor(m/k)`, and assigns coordinates to variables shared between parts.
pub fn partition_clauses(f: &CnfFormula, k: usize) -> Result<PartitionLayout> {
    let m = f.num_clauses();
    if k == 0 || k > m {
        return Err(Error::precondition(format!(
            "need 1 <= k <= m, got k = {k}, m = {m}"
        )));
    }
    let base = m / k;
    let extra = m % k;
    let mut parts = Vec::with_capacity(k);
    let mut start = 0;
    for i in 0..k {
        let len = base + usize::from(i < extra);
        parts.push(start..start + len);
        start += len;
    }
    let n = f.num_vars() as usize;
    let mut var_parts: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, range) in parts.iter().enumerate() {
        for clause in &f.clauses()[range.clone()] {
            for lit in clause {
                let vp = &mut var_parts[lit.unsigned_abs() as usize - 1];
                if vp.last() != Some(&i) {
                    vp.push(i);
                }
            }
        }
    }
    let mut coords = vec![None; n];
    let mut x_vars = Vec::new();
    let mut y_vars = Vec::new();
    let mut d = 0;
    for (vi, vp) in var_parts.iter().enumerate() {
        let var = vi as u32 + 1;
        match vp.len() {
            0 | 1 => {}
            2 => {
                coords[vi] = Some(Coord::Single(d));
                x_vars.push(var);
                d += 1;
            }
            3 => {
                coords[vi] = Some(Coord::Pair(d, d + 1));
                y_vars.push(var);
                d += 2;
            }
            c => {
                return Err(Error::precondition(format!(
                    "variable {var} occurs in {c} parts; normalize the formula first"
                )))
            }
        }
    }
    Ok(PartitionLayout {
        parts,
        var_parts,
        coords,
        x_vars,
        y_vars,
        d,
    })
}

/// The group of part `i`: one vector per distinct gadget image of a
/// satisfying assignment of the part, in first-seen order. An
/// unsatisfiable part yields an empty list.
pub fn encode_part(
    f: &CnfFormula,
    layout: &PartitionLayout,
    i: usize,
    field: PrimeField,
    var_limit: usize,
) -> Result<Vec<FieldVec>> {
    let vars = layout.part_vars(f, i);
    if vars.len() > var_limit || vars.len() > 63 {
        return Err(Error::budget(
            format!("variables in part {i}"),
            vars.len() as u128,
            var_limit as u128,
        ));
    }
    let local: HashMap<u32, usize> = vars.iter().enumerate().map(|(j, &v)| (v, j)).collect();
    let masks: Vec<(u64, u64)> = f.clauses()[layout.parts[i].clone()]
        .iter()
        .map(|c| local_masks(c, &local))
        .collect();
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    for a in 0u64..(1u64 << vars.len()) {
        if !masks
            .iter()
            .all(|&(pos, neg)| a & pos != 0 || !a & neg != 0)
        {
            continue;
        }
        let v = layout.part_vector(field, i, |x| a >> local[&x] & 1 == 1, &vars);
        if !seen.contains_key(&v) {
            seen.insert(v.clone(), out.len());
            out.push(v);
        }
    }
    Ok(out)
}

fn local_masks(clause: &[Lit], local: &HashMap<u32, usize>) -> (u64, u64) {
    clause.iter().fold((0, 0), |(pos, neg), &l| {
        let bit = 1u64 << local[&l.unsigned_abs()];
        if l > 0 {
            (pos | bit, neg)
        } else {
            (pos, neg | bit)
        }
    })
}

/// Output of [`reduce_sat_to_vectorsum`].
#[derive(Debug, Clone)]
pub struct SatReduction {
    pub instance: VectorSumInstance,
    pub layout: PartitionLayout,
    /// Parts with no satisfying assignment (their groups are empty).
    pub empty_parts: Vec<usize>,
}

impl SatReduction {
    /// Maps a satisfying assignment (`assignment[v - 1]`) to the indices of
    /// its restrictions in every group.
    pub fn witness_from_assignment(
        &self,
        f: &CnfFormula,
        assignment: &[bool],
    ) -> Result<Vec<usize>> {
        let field = self.instance.field();
        let mut witness = Vec::with_capacity(self.layout.k());
        for (i, group) in self.instance.groups().iter().enumerate() {
            let vars = self.layout.part_vars(f, i);
            let v = self
                .layout
                .part_vector(field, i, |x| assignment[x as usize - 1], &vars);
            let idx = group.iter().position(|u| *u == v).ok_or_else(|| {
                Error::VerificationFailed(format!("assignment does not satisfy part {i}"))
            })?;
            witness.push(idx);
        }
        Ok(witness)
    }
}

/// Reduces a normalized formula to k-VectorSum over `F_5` with target 0.
pub fn reduce_sat_to_vectorsum(f: &CnfFormula, k: usize) -> Result<SatReduction> {
    reduce_sat_to_vectorsum_with(f, k, PrimeField::F5, DEFAULT_PART_VAR_LIMIT)
}

pub fn reduce_sat_to_vectorsum_with(
    f: &CnfFormula,
    k: usize,
    field: PrimeField,
    var_limit: usize,
) -> Result<SatReduction> {
    if field.modulus() < 3 {
        return Err(Error::precondition("the gadget needs 1 != -1, i.e. p >= 3"));
    }
    if !f.is_normalized() {
        return Err(Error::precondition(
            "formula must have at most 3 occurrences per variable",
        ));
    }
    let layout = partition_clauses(f, k)?;
    let mut groups = Vec::with_capacity(k);
    let mut empty_parts = Vec::new();
    for i in 0..k {
        let g = encode_part(f, &layout, i, field, var_limit)?;
        if g.is_empty() {
            empty_parts.push(i);
        }
        groups.push(g);
    }
    let instance = VectorSumInstance::with_zero_target(field, layout.dim(), groups)?;
    Ok(SatReduction {
        instance,
        layout,
        empty_parts,
    })
}

/// Counterexample to one of the two gadget properties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GadgetViolation {
    /// `groups[group][u] == a * groups[group][v]`.
    ScalarMultiple {
        group: usize,
        u: usize,
        v: usize,
        a: u32,
    },
    /// `u - w == a * (w - v)` for distinct `u, v, w` of one group.
    Collinear {
        group: usize,
        u: usize,
        v: usize,
        w: usize,
        a: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetReport {
    pub p3: bool,
    pub p4: bool,
    pub witnesses: Vec<GadgetViolation>,
}

impl GadgetReport {
    pub fn passed(&self) -> bool {
        self.p3 && self.p4
    }
}

/// Exhaustively checks, per group, that distinct vectors are never scalar
/// multiples (P3) and that no three distinct vectors satisfy
/// `u - w = a (w - v)` with `a != 0` (P4). Records the first violation of
/// each property.
pub fn check_gadget_properties(inst: &VectorSumInstance) -> GadgetReport {
    let f = inst.field();
    let mut p3_witness = None;
    let mut p4_witness = None;
    for (gi, g) in inst.groups().iter().enumerate() {
        for (ui, u) in g.iter().enumerate() {
            for (vi, v) in g.iter().enumerate() {
                if ui == vi || u == v {
                    continue;
                }
                if p3_witness.is_none() {
                    if let Some(a) = (1..f.modulus()).find(|&a| *u == v.scale(a)) {
                        p3_witness = Some(GadgetViolation::ScalarMultiple {
                            group: gi,
                            u: ui,
                            v: vi,
                            a,
                        });
                    }
                }
                if p4_witness.is_some() {
                    continue;
                }
                for (wi, w) in g.iter().enumerate() {
                    if wi == ui || wi == vi || w == u || w == v {
                        continue;
                    }
                    let lhs = u - w;
                    let rhs = w - v;
                    if let Some(a) = (1..f.modulus()).find(|&a| lhs == rhs.scale(a)) {
                        p4_witness = Some(GadgetViolation::Collinear {
                            group: gi,
                            u: ui,
                            v: vi,
                            w: wi,
                            a,
                        });
                        break;
                    }
                }
            }
        }
    }
    GadgetReport {
        p3: p3_witness.is_none(),
        p4: p4_witness.is_none(),
        witnesses: p3_witness.into_iter().chain(p4_witness).collect(),
    }
}

/// Lexicographically first witness (group 0 most significant), or `None`.
pub fn solve_vectorsum_bruteforce(
    inst: &VectorSumInstance,
    budget: u128,
) -> Result<Option<Vec<usize>>> {
    if inst.groups().iter().any(Vec::is_empty) {
        return Ok(None);
    }
    let space = inst
        .groups()
        .iter()
        .try_fold(1u128, |acc, g| acc.checked_mul(g.len() as u128))
        .unwrap_or(u128::MAX);
    if space > budget {
        return Err(Error::budget("vectorsum search space", space, budget));
    }
    let k = inst.k();
    if k == 0 {
        return Ok(inst.target().is_zero().then(Vec::new));
    }
    // First index of each vector in the last group.
    let mut last: HashMap<&FieldVec, usize> = HashMap::new();
    for (i, v) in inst.groups()[k - 1].iter().enumerate() {
        last.entry(v).or_insert(i);
    }
    let mut picks = Vec::with_capacity(k);
    let start = FieldVec::zeros(inst.field(), inst.dim());
    Ok(search(inst, &last, &start, &mut picks).then_some(picks))
}

fn search(
    inst: &VectorSumInstance,
    last: &HashMap<&FieldVec, usize>,
    partial: &FieldVec,
    picks: &mut Vec<usize>,
) -> bool {
    let depth = picks.len();
    let k = inst.k();
    if depth == k - 1 {
        let need = inst.target() - partial;
        if let Some(&i) = last.get(&need) {
            picks.push(i);
            return true;
        }
        return false;
    }
    for (i, v) in inst.groups()[depth].iter().enumerate() {
        picks.push(i);
        if search(inst, last, &(partial + v), picks) {
            return true;
        }
        picks.pop();
    }
    false
}
