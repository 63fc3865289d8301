//! Line-based low-degree testing of vector-valued functions `F^m -> F^ell`.
//!
//! A function of total degree at most `d` restricted to any line
//! `i -> x + i h` is a univariate polynomial of degree at most `d`, so the
//! alternating binomial combination of its values at `d + 2` consecutive
//! points vanishes. The tester checks that identity on one line.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ff::{FieldVec, PrimeField};
use crate::scalar::Fraction;
use crate::vectorsum::LineReader;

/// Default cap on enumerated (x, h) pairs or candidate polynomials.
pub const DEFAULT_LDT_BUDGET: u128 = 50_000_000;

/// A total function `F^m -> F^ell` stored as `p^m` rows of `ell` residues.
///
/// Point `x` has index `sum_j x_j p^j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TabulatedFunction {
    field: PrimeField,
    m: usize,
    ell: usize,
    table: Vec<u32>,
}

impl TabulatedFunction {
    pub fn new(field: PrimeField, m: usize, ell: usize, table: Vec<u32>) -> Result<Self> {
        let points = point_count(field, m)?;
        if table.len() as u128 != points as u128 * ell as u128 {
            return Err(Error::DimensionMismatch {
                expected: points * ell,
                found: table.len(),
            });
        }
        if table.iter().any(|&x| x >= field.modulus()) {
            return Err(Error::precondition("table entries must be reduced"));
        }
        Ok(TabulatedFunction {
            field,
            m,
            ell,
            table,
        })
    }

    /// Tabulates `f` at every point of `F^m`.
    pub fn from_fn(
        field: PrimeField,
        m: usize,
        ell: usize,
        mut f: impl FnMut(&[u32]) -> Vec<u32>,
    ) -> Result<Self> {
        let points = point_count(field, m)?;
        let mut table = Vec::with_capacity(points * ell);
        let mut x = vec![0u32; m];
        for _ in 0..points {
            let y = f(&x);
            if y.len() != ell {
                return Err(Error::DimensionMismatch {
                    expected: ell,
                    found: y.len(),
                });
            }
            table.extend(y.into_iter().map(|v| v % field.modulus()));
            increment(field, &mut x);
        }
        Ok(TabulatedFunction {
            field,
            m,
            ell,
            table,
        })
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn arity(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn points(&self) -> usize {
        self.table.len() / self.ell.max(1)
    }

    pub fn point_index(&self, x: &[u32]) -> usize {
        let p = self.field.modulus() as usize;
        x.iter().rev().fold(0, |acc, &xi| acc * p + xi as usize)
    }

    pub fn at_index(&self, idx: usize) -> &[u32] {
        &self.table[idx * self.ell..(idx + 1) * self.ell]
    }

    pub fn at(&self, x: &[u32]) -> &[u32] {
        self.at_index(self.point_index(x))
    }

    pub fn set(&mut self, x: &[u32], value: &[u32]) {
        let idx = self.point_index(x);
        for (slot, &v) in self.table[idx * self.ell..(idx + 1) * self.ell]
            .iter_mut()
            .zip(value)
        {
            *slot = v % self.field.modulus();
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.field.modulus(), self.m, self.ell);
        for idx in 0..self.points() {
            let row: Vec<String> = self.at_index(idx).iter().map(u32::to_string).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = LineReader::new(text);
        let (n, header) = lines.next_line()?;
        let nums: Vec<u64> = header
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::parse(n, format!("bad number `{t}`")))
            })
            .collect::<Result<_>>()?;
        let [p, m, ell] = nums[..] else {
            return Err(Error::parse(n, "expected header `p m ell`"));
        };
        let field = PrimeField::new(p as u32).map_err(|e| Error::parse(n, e.to_string()))?;
        let (m, ell) = (m as usize, ell as usize);
        let points = point_count(field, m).map_err(|e| Error::parse(n, e.to_string()))?;
        let mut table = Vec::with_capacity(points * ell);
        for _ in 0..points {
            let (ln, line) = lines.next_line()?;
            let v = FieldVec::parse(field, line).map_err(|msg| Error::parse(ln, msg))?;
            if v.len() != ell {
                return Err(Error::parse(
                    ln,
                    format!("expected {ell} residues, found {}", v.len()),
                ));
            }
            table.extend_from_slice(v.entries());
        }
        lines.expect_end()?;
        Self::new(field, m, ell, table)
    }
}

fn point_count(field: PrimeField, m: usize) -> Result<usize> {
    field
        .checked_power(m as u32)
        .filter(|&n| n <= 1 << 32)
        .map(|n| n as usize)
        .ok_or_else(|| Error::precondition(format!("p^m too large for m = {m}")))
}

/// Advances `x` to the next point in index order (wrapping to 0).
fn increment(field: PrimeField, x: &mut [u32]) {
    for xi in x.iter_mut() {
        *xi += 1;
        if *xi < field.modulus() {
            return;
        }
        *xi = 0;
    }
}

/// Tester parameters for degree `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LdtParams {
    field: PrimeField,
    d: u32,
    alphas: Vec<u32>,
}

impl LdtParams {
    pub fn new(field: PrimeField, d: u32) -> Result<Self> {
        Ok(LdtParams {
            field,
            d,
            alphas: ldt_coefficients(d, field)?,
        })
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.d
    }

    /// `alpha_0, ..., alpha_{d+1}`.
    #[inline]
    pub fn alphas(&self) -> &[u32] {
        &self.alphas
    }

    fn check(&self, f: &TabulatedFunction) -> Result<()> {
        if f.field() != self.field {
            return Err(Error::precondition(
                "tester and function use different fields",
            ));
        }
        Ok(())
    }
}

/// `alpha_i = (-1)^(i+1) C(d+1, i) mod p` for `i = 0..=d+1`.
pub fn ldt_coefficients(d: u32, field: PrimeField) -> Result<Vec<u32>> {
    field.check_degree(d)?;
    let mut out = Vec::with_capacity(d as usize + 2);
    let mut binom: u64 = 1;
    for i in 0..=(d as u64 + 1) {
        out.push(field.signed(i % 2 == 0, binom));
        binom = binom * (d as u64 + 1 - i) / (i + 1);
    }
    Ok(out)
}

/// Whether `sum_i alpha_i f(x + i h)` vanishes.
pub fn line_test(f: &TabulatedFunction, x: &[u32], h: &[u32], params: &LdtParams) -> bool {
    let mut acc = vec![0u32; f.ell()];
    let mut pt = vec![0u32; f.arity()];
    line_combination(f, x, h, params.alphas(), 0, &mut pt, &mut acc);
    acc.iter().all(|&a| a == 0)
}

/// Accumulates `sum_{i >= start} alphas[i] f(x + i h)` into `acc`.
fn line_combination(
    f: &TabulatedFunction,
    x: &[u32],
    h: &[u32],
    alphas: &[u32],
    start: usize,
    pt: &mut [u32],
    acc: &mut [u32],
) {
    let field = f.field();
    for (i, &a) in alphas.iter().enumerate().skip(start) {
        let step = field.reduce_u64(i as u64);
        for ((pj, &xj), &hj) in pt.iter_mut().zip(x).zip(h) {
            *pj = field.add(xj, field.mul(step, hj));
        }
        for (slot, &v) in acc.iter_mut().zip(f.at(pt)) {
            *slot = field.add(*slot, field.mul(a, v));
        }
    }
}

/// How [`reject_rate`] samples `(x, h)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMode {
    /// Every pair, refusing when `p^(2m)` exceeds the budget.
    Exhaustive {
        budget: u128,
    },
    MonteCarlo {
        trials: u64,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RejectRate {
    Exact(Fraction),
    Estimated {
        rate: f64,
        /// Half-width of the normal-approximation 95% interval.
        half_width: f64,
        trials: u64,
        rejections: u64,
    },
}

impl RejectRate {
    pub fn as_f64(&self) -> f64 {
        match *self {
            RejectRate::Exact(r) => crate::scalar::fraction_to_f64(r),
            RejectRate::Estimated { rate, .. } => rate,
        }
    }
}

/// Fraction of `(x, h)` pairs on which [`line_test`] rejects.
pub fn reject_rate(
    f: &TabulatedFunction,
    params: &LdtParams,
    mode: RateMode,
) -> Result<RejectRate> {
    params.check(f)?;
    let field = f.field();
    let m = f.arity();
    match mode {
        RateMode::Exhaustive { budget } => {
            let pairs = field
                .checked_power(2 * m as u32)
                .map(u128::from)
                .unwrap_or(u128::MAX);
            if pairs > budget {
                return Err(Error::budget("line test pairs", pairs, budget));
            }
            let mut x = vec![0u32; m];
            let mut h = vec![0u32; m];
            let points = f.points();
            let mut rejections = 0u64;
            for _ in 0..points {
                for _ in 0..points {
                    if !line_test(f, &x, &h, params) {
                        rejections += 1;
                    }
                    increment(field, &mut h);
                }
                increment(field, &mut x);
            }
            Ok(RejectRate::Exact(Fraction::new(rejections, pairs as u64)))
        }
        RateMode::MonteCarlo { trials, seed } => {
            if trials == 0 {
                return Err(Error::precondition("need at least one trial"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut x = vec![0u32; m];
            let mut h = vec![0u32; m];
            let mut rejections = 0u64;
            for _ in 0..trials {
                for v in x.iter_mut().chain(h.iter_mut()) {
                    *v = rng.gen_range(0..field.modulus());
                }
                if !line_test(f, &x, &h, params) {
                    rejections += 1;
                }
            }
            let rate = rejections as f64 / trials as f64;
            let half_width = 1.96 * (rate * (1.0 - rate) / trials as f64).sqrt();
            Ok(RejectRate::Estimated {
                rate,
                half_width,
                trials,
                rejections,
            })
        }
    }
}

/// Exponent tuples of all monomials in `m` variables of total degree at
/// most `d`, in graded order.
pub fn monomials(m: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for total in 0..=d {
        let mut cur = vec![0u32; m];
        push_monomials(&mut out, &mut cur, 0, total);
    }
    out
}

fn push_monomials(out: &mut Vec<Vec<u32>>, cur: &mut [u32], j: usize, left: u32) {
    if j + 1 >= cur.len() {
        if let Some(last) = cur.len().checked_sub(1) {
            cur[last] = left;
            out.push(cur.to_vec());
            cur[last] = 0;
        } else if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for e in (0..=left).rev() {
        cur[j] = e;
        push_monomials(out, cur, j + 1, left - e);
    }
    cur[j] = 0;
}

/// A polynomial map `F^m -> F^ell` of total degree at most `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VecPoly {
    field: PrimeField,
    m: usize,
    monomials: Vec<Vec<u32>>,
    /// One coefficient vector in `F^ell` per monomial.
    coeffs: Vec<FieldVec>,
}

impl VecPoly {
    pub fn new(field: PrimeField, m: usize, d: u32, coeffs: Vec<FieldVec>) -> Result<Self> {
        let monomials = monomials(m, d);
        if coeffs.len() != monomials.len() {
            return Err(Error::DimensionMismatch {
                expected: monomials.len(),
                found: coeffs.len(),
            });
        }
        Ok(VecPoly {
            field,
            m,
            monomials,
            coeffs,
        })
    }

    /// Number of polynomials with the given shape, `p^(ell * #monomials)`.
    pub fn count(field: PrimeField, m: usize, ell: usize, d: u32) -> Option<u64> {
        field.checked_power((ell * monomials(m, d).len()) as u32)
    }

    /// The polynomial whose coefficient digits (component-major within each
    /// monomial) are the base-`p` digits of `idx`.
    pub fn from_index(field: PrimeField, m: usize, ell: usize, d: u32, mut idx: u64) -> Self {
        let monomials = monomials(m, d);
        let p = field.modulus() as u64;
        let coeffs = monomials
            .iter()
            .map(|_| {
                FieldVec::new(
                    field,
                    (0..ell).map(|_| {
                        let digit = (idx % p) as u32;
                        idx /= p;
                        digit
                    }),
                )
            })
            .collect();
        VecPoly {
            field,
            m,
            monomials,
            coeffs,
        }
    }

    pub fn random<R: Rng + ?Sized>(
        field: PrimeField,
        m: usize,
        ell: usize,
        d: u32,
        rng: &mut R,
    ) -> Self {
        let monomials = monomials(m, d);
        let coeffs = monomials
            .iter()
            .map(|_| FieldVec::new(field, (0..ell).map(|_| rng.gen_range(0..field.modulus()))))
            .collect();
        VecPoly {
            field,
            m,
            monomials,
            coeffs,
        }
    }

    pub fn eval(&self, x: &[u32]) -> Vec<u32> {
        let f = self.field;
        let ell = self.coeffs.first().map_or(0, FieldVec::len);
        let mut out = vec![0u32; ell];
        for (mono, c) in self.monomials.iter().zip(&self.coeffs) {
            let term = mono
                .iter()
                .zip(x)
                .fold(1, |acc, (&e, &xi)| f.mul(acc, f.pow(xi, e as u64)));
            for (slot, &ci) in out.iter_mut().zip(c.entries()) {
                *slot = f.add(*slot, f.mul(term, ci));
            }
        }
        out
    }

    pub fn tabulate(&self) -> TabulatedFunction {
        let ell = self.coeffs.first().map_or(0, FieldVec::len);
        TabulatedFunction::from_fn(self.field, self.m, ell, |x| self.eval(x))
            .expect("arity fits because the polynomial was constructed")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distance {
    /// Minimum over every candidate polynomial.
    Exact(Fraction),
    /// Distance to the self-corrected function; an upper bound once that
    /// function has degree `d`.
    Estimated(Fraction),
}

impl Distance {
    pub fn value(&self) -> Fraction {
        match *self {
            Distance::Exact(x) | Distance::Estimated(x) => x,
        }
    }
}

/// Exact relative Hamming distance from `f` to the nearest polynomial map of
/// total degree at most `d`, enumerating all `p^(ell * #monomials)`
/// candidates.
pub fn distance_to_degree(f: &TabulatedFunction, d: u32, budget: u128) -> Result<Distance> {
    let field = f.field();
    let monos = monomials(f.arity(), d);
    let digits = f.ell() * monos.len();
    let count = field
        .checked_power(digits as u32)
        .map(u128::from)
        .unwrap_or(u128::MAX);
    let points = f.points();
    if count.saturating_mul(points as u128) > budget {
        return Err(Error::budget(
            "candidate polynomial evaluations",
            count * points as u128,
            budget,
        ));
    }
    // Monomial values at every point.
    let mut mono_vals = vec![0u32; monos.len() * points];
    let mut x = vec![0u32; f.arity()];
    for idx in 0..points {
        for (j, mono) in monos.iter().enumerate() {
            mono_vals[j * points + idx] = mono
                .iter()
                .zip(&x)
                .fold(1, |acc, (&e, &xi)| field.mul(acc, field.pow(xi, e as u64)));
        }
        increment(field, &mut x);
    }
    // Odometer over coefficient digits; bumping digit (j, c) by one adds
    // monomial j to component c, including on wrap-around (p * mono = 0).
    let ell = f.ell();
    let mut current = vec![0u32; points * ell];
    let mut digit_vals = vec![0u32; digits];
    let mut best = points;
    for _ in 0..count {
        let mismatches = (0..points)
            .filter(|&idx| current[idx * ell..(idx + 1) * ell] != *f.at_index(idx))
            .count();
        best = best.min(mismatches);
        if best == 0 {
            break;
        }
        for (pos, dv) in digit_vals.iter_mut().enumerate() {
            let (j, c) = (pos / ell, pos % ell);
            for idx in 0..points {
                let slot = &mut current[idx * ell + c];
                *slot = field.add(*slot, mono_vals[j * points + idx]);
            }
            *dv += 1;
            if *dv < field.modulus() {
                break;
            }
            *dv = 0;
        }
    }
    Ok(Distance::Exact(Fraction::new(best as u64, points as u64)))
}

/// Distance from `f` to its self-correction.
pub fn distance_estimate(f: &TabulatedFunction, params: &LdtParams) -> Result<Distance> {
    params.check(f)?;
    let mut x = vec![0u32; f.arity()];
    let mut mismatches = 0u64;
    for _ in 0..f.points() {
        if self_correct(f, &x, params)?.entries() != f.at(&x) {
            mismatches += 1;
        }
        increment(f.field(), &mut x);
    }
    Ok(Distance::Estimated(Fraction::new(
        mismatches,
        f.points() as u64,
    )))
}

/// Majority over all offsets `h` of `sum_{i=1}^{d+1} alpha_i f(x + i h)`,
/// ties going to the lexicographically smallest value.
pub fn self_correct(f: &TabulatedFunction, x: &[u32], params: &LdtParams) -> Result<FieldVec> {
    params.check(f)?;
    if x.len() != f.arity() {
        return Err(Error::DimensionMismatch {
            expected: f.arity(),
            found: x.len(),
        });
    }
    let mut votes: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
    let mut h = vec![0u32; f.arity()];
    let mut pt = vec![0u32; f.arity()];
    for _ in 0..f.points() {
        let mut acc = vec![0u32; f.ell()];
        line_combination(f, x, &h, params.alphas(), 1, &mut pt, &mut acc);
        *votes.entry(acc).or_default() += 1;
        increment(f.field(), &mut h);
    }
    let mut best: Option<(&Vec<u32>, u64)> = None;
    for (value, &count) in &votes {
        if best.is_none_or(|(_, c)| count > c) {
            best = Some((value, count));
        }
    }
    let (value, _) = best.expect("at least one offset");
    Ok(FieldVec::new(f.field(), value.iter().copied()))
}
