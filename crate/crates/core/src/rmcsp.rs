//! k-VectorSum to constant-gap clique through a degree-2 Reed-Muller CSP.
//!
//! Variables `x_{alpha,beta}` for `alpha, beta` in `F^k` take values in
//! `F^ell`. Low-degree and linearity tests become test groups whose
//! vertices are the satisfying local assignments; every variable becomes a
//! group of `p^ell` candidate values; the neighbor and wrap tests are
//! enforced on edges between variable vertices.
//!
//! Elements of `F^k` are handled as `u64` indices (base-`p` digits, entry 0
//! least significant) and values in `F^ell` as packed `u64` symbols.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ff::{bilinear_f, FieldMat, FieldVec, PrimeField, VecCodec};
use crate::grouped::{materialize, GroupedGraph};
use crate::ldt::ldt_coefficients;
use crate::oracles::{for_each_full_clique, max_clique_materialized};
use crate::vectorsum::{LineReader, VectorSumInstance};

/// `2k + 4 ceil(log2 n)` with `n` the total number of source vectors.
pub fn default_ell(inst: &VectorSumInstance) -> usize {
    let n = inst.size().max(1);
    let log = usize::BITS - (n - 1).leading_zeros();
    2 * inst.k() + 4 * log as usize
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixViolation {
    /// A nonzero `v` with `A_i v = 0` for every `i`.
    Kernel { v: FieldVec },
    /// `f(alpha, u) = f(alpha, v)` for distinct `u, v` of one group.
    Collision {
        group: usize,
        u: usize,
        v: usize,
        alpha: FieldVec,
    },
    /// `f(alpha, u) + f(alpha', v) = f(alpha + alpha', w)` with
    /// `(alpha, alpha') != (0, 0)`.
    Sum {
        group: usize,
        u: usize,
        v: usize,
        w: usize,
        alpha: FieldVec,
        alpha2: FieldVec,
    },
}

/// Outcome of checking the three matrix properties. Each property is
/// decided exactly through a rank computation, so no enumeration budget is
/// involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixReport {
    pub prop1: bool,
    pub prop2: bool,
    pub prop3: bool,
    pub witnesses: Vec<MatrixViolation>,
}

impl MatrixReport {
    pub fn passed(&self) -> bool {
        self.prop1 && self.prop2 && self.prop3
    }
}

/// Checks, for matrices `A_1..A_ell` in `F^{k x d}`:
///
/// 1. no nonzero `v` is killed by every `A_i` (the stacked matrix has rank `d`);
/// 2. `alpha -> f(alpha, u - v)` is injective for distinct `u, v` of a group;
/// 3. `(alpha, alpha') -> f(alpha, u - w) + f(alpha', v - w)` is injective
///    for distinct `u, v, w` of a group.
pub fn verify_matrix_properties(
    mats: &[FieldMat],
    inst: &VectorSumInstance,
) -> Result<MatrixReport> {
    let field = inst.field();
    let (k, d) = (inst.k(), inst.dim());
    if mats.is_empty() {
        return Err(Error::precondition("need at least one matrix"));
    }
    for m in mats {
        if m.rows() != k || m.cols() != d || m.field() != field {
            return Err(Error::precondition(format!(
                "matrices must be {k} x {d} over F_{}",
                field.modulus()
            )));
        }
    }
    let mut witnesses = Vec::new();
    let stacked = FieldMat::vstack(mats)?;
    let prop1 = match stacked.kernel_vector() {
        Some(v) => {
            witnesses.push(MatrixViolation::Kernel { v });
            false
        }
        None => true,
    };
    // images[w][g][i] = A_w v_i of group g
    let images: Vec<Vec<Vec<FieldVec>>> = mats
        .iter()
        .map(|m| {
            inst.groups()
                .iter()
                .map(|g| g.iter().map(|v| m.mul_vec(v)).collect::<Result<_>>())
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let diff_rows = |g: usize, a: usize, b: usize| -> Vec<u32> {
        images
            .iter()
            .flat_map(|img| (&img[g][a] - &img[g][b]).entries().to_vec())
            .collect()
    };
    let mut prop2 = true;
    let mut prop3 = true;
    for (gi, group) in inst.groups().iter().enumerate() {
        let n = group.len();
        for u in 0..n {
            for v in u + 1..n {
                if !prop2 {
                    break;
                }
                // Rows A_w (u - v); alpha is in the left kernel.
                let m = FieldMat::new(field, mats.len(), k, diff_rows(gi, u, v))?;
                if let Some(alpha) = m.kernel_vector() {
                    witnesses.push(MatrixViolation::Collision {
                        group: gi,
                        u,
                        v,
                        alpha,
                    });
                    prop2 = false;
                }
            }
        }
        for w in 0..n {
            for u in 0..n {
                for v in u + 1..n {
                    if !prop3 || u == w || v == w {
                        continue;
                    }
                    let a = diff_rows(gi, u, w);
                    let b = diff_rows(gi, v, w);
                    let mut data = Vec::with_capacity(2 * a.len());
                    for row in 0..mats.len() {
                        data.extend_from_slice(&a[row * k..(row + 1) * k]);
                        data.extend_from_slice(&b[row * k..(row + 1) * k]);
                    }
                    let m = FieldMat::new(field, mats.len(), 2 * k, data)?;
                    if let Some(x) = m.kernel_vector() {
                        witnesses.push(MatrixViolation::Sum {
                            group: gi,
                            u,
                            v,
                            w,
                            alpha: FieldVec::new(field, x.entries()[..k].iter().copied()),
                            alpha2: FieldVec::new(field, x.entries()[k..].iter().copied()),
                        });
                        prop3 = false;
                    }
                }
            }
        }
    }
    Ok(MatrixReport {
        prop1,
        prop2,
        prop3,
        witnesses,
    })
}

/// Draws uniformly random `k x d` matrices until all three properties hold.
pub fn sample_matrices(
    inst: &VectorSumInstance,
    ell: usize,
    seed: u64,
    max_retries: usize,
) -> Result<Vec<FieldMat>> {
    if ell == 0 {
        return Err(Error::precondition("ell must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = [0usize; 3];
    for _ in 0..max_retries.max(1) {
        let mats: Vec<FieldMat> = (0..ell)
            .map(|_| FieldMat::random(inst.field(), inst.k(), inst.dim(), &mut rng))
            .collect();
        let report = verify_matrix_properties(&mats, inst)?;
        if report.passed() {
            return Ok(mats);
        }
        for (slot, ok) in failures
            .iter_mut()
            .zip([report.prop1, report.prop2, report.prop3])
        {
            if !ok {
                *slot += 1;
            }
        }
    }
    let worst = (0..3)
        .max_by_key(|&i| (failures[i], std::cmp::Reverse(i)))
        .unwrap_or(0);
    Err(Error::SamplingFailed {
        attempts: max_retries.max(1),
        reason: format!(
            "matrix property {} failed most often ({} of {} draws)",
            worst + 1,
            failures[worst],
            max_retries.max(1)
        ),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TestFamily {
    LowDegree,
    LinearityAlpha,
    LinearityBeta,
    Neighbor,
    Wrap,
}

impl TestFamily {
    pub const ALL: [TestFamily; 5] = [
        TestFamily::LowDegree,
        TestFamily::LinearityAlpha,
        TestFamily::LinearityBeta,
        TestFamily::Neighbor,
        TestFamily::Wrap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestFamily::LowDegree => "low_degree",
            TestFamily::LinearityAlpha => "linearity_alpha",
            TestFamily::LinearityBeta => "linearity_beta",
            TestFamily::Neighbor => "neighbor",
            TestFamily::Wrap => "wrap",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestKind {
    LowDegree,
    LinearityAlpha,
    LinearityBeta,
    Neighbor(usize),
    Wrap,
}

impl TestKind {
    pub fn family(self) -> TestFamily {
        match self {
            TestKind::LowDegree => TestFamily::LowDegree,
            TestKind::LinearityAlpha => TestFamily::LinearityAlpha,
            TestKind::LinearityBeta => TestFamily::LinearityBeta,
            TestKind::Neighbor(_) => TestFamily::Neighbor,
            TestKind::Wrap => TestFamily::Wrap,
        }
    }

    pub fn arity(self) -> usize {
        match self {
            TestKind::LowDegree => 4,
            TestKind::LinearityAlpha | TestKind::LinearityBeta => 3,
            TestKind::Neighbor(_) | TestKind::Wrap => 2,
        }
    }
}

/// One test. The anchor lists elements of `F^k` as indices:
/// `[alpha, beta, t1, t2]` for low-degree, `[alpha, alpha', beta]` and
/// `[alpha, beta, beta']` for the linearity tests, `[alpha, beta]` otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RmTest {
    pub kind: TestKind,
    pub anchor: Vec<u64>,
}

/// A homogeneous linear condition `sum_j c_j x_j = 0` over distinct
/// variables, applied componentwise in `F^ell`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    /// Sorted distinct variable indices.
    pub vars: Vec<u64>,
    pub coeffs: Vec<u32>,
}

impl Constraint {
    /// Position of the solved-for variable: the last nonzero coefficient.
    fn pivot(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0)
    }

    fn free_count(&self) -> usize {
        self.vars.len() - usize::from(self.pivot().is_some())
    }
}

/// A total assignment `x_{alpha,beta}`, indexed by `alpha * p^k + beta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub values: Vec<u64>,
}

/// Which copy of which test or variable a group stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupInfo {
    Test { test: RmTest, copy: u64 },
    Variable { var: u64, copy: u64 },
}

/// A vertex: its group and the values it assigns to the group's variables
/// (in the order of [`RmCsp::group_vars`]).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RmVertex {
    pub group: usize,
    pub values: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct RmCsp {
    source: VectorSumInstance,
    mats: Vec<FieldMat>,
    field: PrimeField,
    k: usize,
    q: u64,
    fk: VecCodec,
    fl: VecCodec,
    ldt: Vec<u32>,
    /// Sorted `f(alpha, v)` symbols for `v` in `V_u`, at `u * q + alpha`.
    nbr: Vec<Vec<u64>>,
    units: Vec<u64>,
    ones: u64,
}

impl RmCsp {
    /// Builds the CSP after checking the matrix properties and the zero
    /// target.
    pub fn new(source: VectorSumInstance, mats: Vec<FieldMat>) -> Result<Self> {
        let field = source.field();
        if field.modulus() < 5 {
            return Err(Error::precondition("the degree-2 line test needs p >= 5"));
        }
        if !source.target().is_zero() {
            return Err(Error::precondition("the reduction is defined for target 0"));
        }
        if source.k() == 0 {
            return Err(Error::precondition("need at least one group"));
        }
        let report = verify_matrix_properties(&mats, &source)?;
        if !report.passed() {
            return Err(Error::VerificationFailed(format!(
                "matrix properties do not hold: {report:?}"
            )));
        }
        let k = source.k();
        let fk = VecCodec::new(field, k)?;
        let fl = VecCodec::new(field, mats.len())?;
        let q = fk.size();
        q.checked_pow(4)
            .and_then(|q4| q4.checked_mul(8))
            .filter(|&n| n <= usize::MAX as u64)
            .ok_or_else(|| Error::precondition("8 p^(4k) groups do not fit in memory indices"))?;
        let mut nbr = Vec::with_capacity(k * q as usize);
        for group in source.groups() {
            for a in 0..q {
                let alpha = fk.unpack_vec(a);
                let mut set: Vec<u64> = group
                    .iter()
                    .map(|v| bilinear_f(&alpha, v, &mats).map(|y| fl.pack_vec(&y)))
                    .collect::<Result<_>>()?;
                set.sort_unstable();
                set.dedup();
                nbr.push(set);
            }
        }
        let units = (0..k)
            .map(|u| fk.pack_vec(&FieldVec::unit(field, k, u)))
            .collect();
        let ones = fk.pack(&vec![1; k]);
        Ok(RmCsp {
            ldt: ldt_coefficients(2, field)?,
            source,
            mats,
            field,
            k,
            q,
            fk,
            fl,
            nbr,
            units,
            ones,
        })
    }

    /// [`sample_matrices`] followed by [`RmCsp::new`].
    pub fn sample(
        source: VectorSumInstance,
        ell: usize,
        seed: u64,
        max_retries: usize,
    ) -> Result<Self> {
        let mats = sample_matrices(&source, ell, seed, max_retries)?;
        Self::new(source, mats)
    }

    pub fn source(&self) -> &VectorSumInstance {
        &self.source
    }

    pub fn mats(&self) -> &[FieldMat] {
        &self.mats
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ell(&self) -> usize {
        self.mats.len()
    }

    /// `|F^k| = p^k`.
    pub fn q(&self) -> u64 {
        self.q
    }

    /// Number of values a variable can take, `p^ell`.
    pub fn value_count(&self) -> u64 {
        self.fl.size()
    }

    pub fn value_codec(&self) -> VecCodec {
        self.fl
    }

    pub fn point_codec(&self) -> VecCodec {
        self.fk
    }

    pub fn var_count(&self) -> u64 {
        self.q * self.q
    }

    #[inline]
    pub fn var(&self, alpha: u64, beta: u64) -> u64 {
        alpha * self.q + beta
    }

    #[inline]
    pub fn split_var(&self, var: u64) -> (u64, u64) {
        (var / self.q, var % self.q)
    }

    pub fn test_count(&self, family: TestFamily) -> u64 {
        let q = self.q;
        match family {
            TestFamily::LowDegree => q.pow(4),
            TestFamily::LinearityAlpha | TestFamily::LinearityBeta => q.pow(3),
            TestFamily::Neighbor => self.k as u64 * q * q,
            TestFamily::Wrap => q * q,
        }
    }

    /// Lazily enumerates the tests of one family in anchor order.
    pub fn tests(&self, family: TestFamily) -> impl Iterator<Item = RmTest> + '_ {
        let q = self.q;
        let count = self.test_count(family);
        (0..count).map(move |i| match family {
            TestFamily::LowDegree => RmTest {
                kind: TestKind::LowDegree,
                anchor: vec![i / (q * q * q), i / (q * q) % q, i / q % q, i % q],
            },
            TestFamily::LinearityAlpha => RmTest {
                kind: TestKind::LinearityAlpha,
                anchor: vec![i / (q * q), i / q % q, i % q],
            },
            TestFamily::LinearityBeta => RmTest {
                kind: TestKind::LinearityBeta,
                anchor: vec![i / (q * q), i / q % q, i % q],
            },
            TestFamily::Neighbor => RmTest {
                kind: TestKind::Neighbor((i / (q * q)) as usize),
                anchor: vec![i / q % q, i % q],
            },
            TestFamily::Wrap => RmTest {
                kind: TestKind::Wrap,
                anchor: vec![i / q, i % q],
            },
        })
    }

    /// The variables a test reads, in query order (with repetitions).
    pub fn queried(&self, t: &RmTest) -> Vec<u64> {
        let fk = &self.fk;
        let a = &t.anchor;
        match t.kind {
            TestKind::LowDegree => (0..4u32)
                .map(|i| self.var(fk.add_scaled(a[0], i, a[2]), fk.add_scaled(a[1], i, a[3])))
                .collect(),
            TestKind::LinearityAlpha => vec![
                self.var(a[0], a[2]),
                self.var(a[1], a[2]),
                self.var(fk.add(a[0], a[1]), a[2]),
            ],
            TestKind::LinearityBeta => vec![
                self.var(a[0], a[1]),
                self.var(a[0], a[2]),
                self.var(a[0], fk.add(a[1], a[2])),
            ],
            TestKind::Neighbor(u) => vec![
                self.var(a[0], a[1]),
                self.var(a[0], fk.add(a[1], self.units[u])),
            ],
            TestKind::Wrap => vec![
                self.var(a[0], a[1]),
                self.var(a[0], fk.add(a[1], self.ones)),
            ],
        }
    }

    fn linear_coeffs(&self, kind: TestKind) -> Option<Vec<u32>> {
        let minus = self.field.neg(1);
        match kind {
            TestKind::LowDegree => Some(self.ldt.clone()),
            TestKind::LinearityAlpha | TestKind::LinearityBeta => Some(vec![1, 1, minus]),
            _ => None,
        }
    }

    /// The linear condition behind a low-degree or linearity test, with
    /// repeated variables merged.
    pub fn constraint(&self, t: &RmTest) -> Constraint {
        let coeffs = self
            .linear_coeffs(t.kind)
            .expect("only low-degree and linearity tests are linear");
        let mut pairs: Vec<(u64, u32)> = self.queried(t).into_iter().zip(coeffs).collect();
        pairs.sort_unstable_by_key(|&(v, _)| v);
        let mut vars: Vec<u64> = Vec::with_capacity(pairs.len());
        let mut cs: Vec<u32> = Vec::with_capacity(pairs.len());
        for (v, c) in pairs {
            if vars.last() == Some(&v) {
                let last = cs.last_mut().expect("parallel vectors");
                *last = self.field.add(*last, c);
            } else {
                vars.push(v);
                cs.push(c);
            }
        }
        Constraint { vars, coeffs: cs }
    }

    fn in_nbr(&self, u: usize, alpha: u64, diff: u64) -> bool {
        self.nbr[u * self.q as usize + alpha as usize]
            .binary_search(&diff)
            .is_ok()
    }

    pub fn check_test(&self, asg: &Assignment, t: &RmTest) -> bool {
        let vars = self.queried(t);
        let x = |i: usize| asg.values[vars[i] as usize];
        match t.kind {
            TestKind::Neighbor(u) => self.in_nbr(u, t.anchor[0], self.fl.sub(x(1), x(0))),
            TestKind::Wrap => x(1) == x(0),
            kind => {
                let coeffs = self.linear_coeffs(kind).expect("linear test");
                let sum = coeffs
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (i, &c)| self.fl.add_scaled(acc, c, x(i)));
                sum == 0
            }
        }
    }

    /// First failing test of a family, if any.
    pub fn first_failure(&self, asg: &Assignment, family: TestFamily) -> Option<RmTest> {
        self.tests(family).find(|t| !self.check_test(asg, t))
    }

    /// `x_{alpha,beta} = f(alpha, sum_i beta_i v_i)` for the chosen vectors.
    pub fn intended_assignment(&self, witness: &[usize]) -> Result<Assignment> {
        if witness.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                found: witness.len(),
            });
        }
        // g[u][alpha] = f(alpha, v_u); x is linear in beta.
        let mut g = Vec::with_capacity(self.k);
        for (u, &i) in witness.iter().enumerate() {
            let v = self.source.groups()[u]
                .get(i)
                .ok_or_else(|| Error::precondition(format!("group {u} has no vector {i}")))?;
            let row: Vec<u64> = (0..self.q)
                .map(|a| {
                    bilinear_f(&self.fk.unpack_vec(a), v, &self.mats).map(|y| self.fl.pack_vec(&y))
                })
                .collect::<Result<_>>()?;
            g.push(row);
        }
        let mut values = Vec::with_capacity((self.q * self.q) as usize);
        for a in 0..self.q {
            for b in 0..self.q {
                let beta = self.fk.unpack(b);
                let x = beta.iter().enumerate().fold(0u64, |acc, (u, &bu)| {
                    self.fl.add_scaled(acc, bu, g[u][a as usize])
                });
                values.push(x);
            }
        }
        Ok(Assignment { values })
    }

    /// `8 p^(4k)`.
    pub fn group_count_u64(&self) -> u64 {
        8 * self.q.pow(4)
    }

    pub fn group_info(&self, g: usize) -> GroupInfo {
        let q = self.q;
        let q4 = q.pow(4);
        let g = g as u64;
        if g < 2 * q4 {
            let i = g / 2;
            let test = RmTest {
                kind: TestKind::LowDegree,
                anchor: vec![i / (q * q * q), i / (q * q) % q, i / q % q, i % q],
            };
            GroupInfo::Test { test, copy: g % 2 }
        } else if g < 4 * q4 {
            let local = g - 2 * q4;
            let (i, copy) = (local / q, local % q);
            let q3 = q.pow(3);
            let (kind, i) = if i < q3 {
                (TestKind::LinearityAlpha, i)
            } else {
                (TestKind::LinearityBeta, i - q3)
            };
            GroupInfo::Test {
                test: RmTest {
                    kind,
                    anchor: vec![i / (q * q), i / q % q, i % q],
                },
                copy,
            }
        } else {
            let local = g - 4 * q4;
            let copies = 4 * q * q;
            GroupInfo::Variable {
                var: local / copies,
                copy: local % copies,
            }
        }
    }

    /// Group id of a copy of a variable.
    pub fn variable_group(&self, var: u64, copy: u64) -> usize {
        (4 * self.q.pow(4) + var * 4 * self.q * self.q + copy) as usize
    }

    /// Variables whose values a vertex of group `g` specifies.
    pub fn group_vars(&self, g: usize) -> Vec<u64> {
        match self.group_info(g) {
            GroupInfo::Test { test, .. } => self.constraint(&test).vars,
            GroupInfo::Variable { var, .. } => vec![var],
        }
    }

    /// Whether `v` is a vertex of its group.
    pub fn contains(&self, v: &RmVertex) -> bool {
        if v.group as u64 >= self.group_count_u64() || v.values.iter().any(|&x| x >= self.fl.size())
        {
            return false;
        }
        match self.group_info(v.group) {
            GroupInfo::Variable { .. } => v.values.len() == 1,
            GroupInfo::Test { test, .. } => {
                let c = self.constraint(&test);
                v.values.len() == c.vars.len()
                    && c.coeffs
                        .iter()
                        .zip(&v.values)
                        .fold(0u64, |acc, (&ci, &x)| self.fl.add_scaled(acc, ci, x))
                        == 0
            }
        }
    }

    /// Whether two variable values pass every neighbor and wrap test
    /// between the two variables (vacuously when there is none).
    pub fn variables_compatible(&self, a: u64, va: u64, b: u64, vb: u64) -> bool {
        if a == b {
            return va == vb;
        }
        let ((alpha, beta_a), (alpha_b, beta_b)) = (self.split_var(a), self.split_var(b));
        if alpha != alpha_b {
            return true;
        }
        let fk = &self.fk;
        for (u, &e) in self.units.iter().enumerate() {
            if fk.add(beta_a, e) == beta_b && !self.in_nbr(u, alpha, self.fl.sub(vb, va)) {
                return false;
            }
            if fk.add(beta_b, e) == beta_a && !self.in_nbr(u, alpha, self.fl.sub(va, vb)) {
                return false;
            }
        }
        if (fk.add(beta_a, self.ones) == beta_b || fk.add(beta_b, self.ones) == beta_a) && va != vb
        {
            return false;
        }
        true
    }

    /// Iterates the satisfying assignments of a constraint in odometer order
    /// over the free variables (first free variable fastest).
    fn satisfying(&self, c: Constraint) -> impl Iterator<Item = Vec<u64>> + '_ {
        let pivot = c.pivot();
        let free: Vec<usize> = (0..c.vars.len()).filter(|&i| Some(i) != pivot).collect();
        let size = self.fl.size();
        let mut digits = vec![0u64; free.len()];
        let mut done = false;
        let fl = self.fl;
        let field = self.field;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let mut values = vec![0u64; c.vars.len()];
            for (&i, &d) in free.iter().zip(&digits) {
                values[i] = d;
            }
            if let Some(p) = pivot {
                let s = free
                    .iter()
                    .fold(0u64, |acc, &i| fl.add_scaled(acc, c.coeffs[i], values[i]));
                let scale = field.neg(
                    field
                        .inv(c.coeffs[p])
                        .expect("pivot coefficient is nonzero"),
                );
                values[p] = fl.add_scaled(0, scale, s);
            }
            done = true;
            for d in digits.iter_mut() {
                *d += 1;
                if *d < size {
                    done = false;
                    break;
                }
                *d = 0;
            }
            Some(values)
        })
    }

    /// Saturating count of all vertices.
    pub fn vertex_count_exact(&self) -> u128 {
        let q = self.q as u128;
        let size = self.fl.size() as u128;
        let pow = |e: usize| (0..e).fold(1u128, |acc, _| acc.saturating_mul(size));
        let mut total = 0u128;
        for family in [
            TestFamily::LowDegree,
            TestFamily::LinearityAlpha,
            TestFamily::LinearityBeta,
        ] {
            let copies = if family == TestFamily::LowDegree {
                2
            } else {
                q
            };
            for t in self.tests(family) {
                let free = self.constraint(&t).free_count();
                total = total.saturating_add(pow(free).saturating_mul(copies));
            }
        }
        total.saturating_add((4 * q * q * q * q).saturating_mul(size))
    }

    /// `2 p^(4k+4 ell) + 2 p^(4k+2 ell) + 4 p^(4k+ell)`, saturating.
    pub fn vertex_count_bound(&self) -> u128 {
        let p = self.field.modulus() as u128;
        let pow = |e: usize| (0..e).fold(1u128, |acc, _| acc.saturating_mul(p));
        let (k, l) = (self.k, self.ell());
        pow(4 * k + 4 * l)
            .saturating_mul(2)
            .saturating_add(pow(4 * k + 2 * l).saturating_mul(2))
            .saturating_add(pow(4 * k + l).saturating_mul(4))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("rmcsp\n");
        s.push_str(&self.source.to_text());
        let _ = writeln!(s, "ell {}", self.ell());
        for (w, m) in self.mats.iter().enumerate() {
            let _ = writeln!(s, "matrix {w}");
            for r in 0..m.rows() {
                let row: Vec<String> = m.row(r).iter().map(u32::to_string).collect();
                let _ = writeln!(s, "{}", row.join(" "));
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = LineReader::new(text);
        let (n, first) = lines.next_line()?;
        if first.trim() != "rmcsp" {
            return Err(Error::parse(n, "expected `rmcsp`"));
        }
        let source = VectorSumInstance::read(&mut lines)?;
        let ell = lines.keyed_number("ell")? as usize;
        let mut mats = Vec::with_capacity(ell);
        for w in 0..ell {
            let (mn, toks) = lines.keyed_tokens("matrix")?;
            if toks != [w.to_string().as_str()] {
                return Err(Error::parse(mn, format!("expected `matrix {w}`")));
            }
            let mut data = Vec::with_capacity(source.k() * source.dim());
            for _ in 0..source.k() {
                let (rn, row) = lines.next_line()?;
                let v = FieldVec::parse(source.field(), row).map_err(|m| Error::parse(rn, m))?;
                if v.len() != source.dim() {
                    return Err(Error::parse(
                        rn,
                        format!("expected {} residues", source.dim()),
                    ));
                }
                data.extend_from_slice(v.entries());
            }
            mats.push(FieldMat::new(
                source.field(),
                source.k(),
                source.dim(),
                data,
            )?);
        }
        lines.expect_end()?;
        Self::new(source, mats)
    }
}

impl GroupedGraph for RmCsp {
    type Vertex = RmVertex;

    fn group_count(&self) -> usize {
        self.group_count_u64() as usize
    }

    fn group_size(&self, g: usize) -> u128 {
        let size = self.fl.size() as u128;
        match self.group_info(g) {
            GroupInfo::Variable { .. } => size,
            GroupInfo::Test { test, .. } => {
                let free = self.constraint(&test).free_count();
                (0..free).fold(1u128, |acc, _| acc.saturating_mul(size))
            }
        }
    }

    fn vertices(&self, g: usize) -> Box<dyn Iterator<Item = RmVertex> + '_> {
        match self.group_info(g) {
            GroupInfo::Variable { .. } => Box::new((0..self.fl.size()).map(move |x| RmVertex {
                group: g,
                values: vec![x],
            })),
            GroupInfo::Test { test, .. } => Box::new(
                self.satisfying(self.constraint(&test))
                    .map(move |values| RmVertex { group: g, values }),
            ),
        }
    }

    fn group_of(&self, v: &RmVertex) -> usize {
        v.group
    }

    fn adjacent(&self, u: &RmVertex, w: &RmVertex) -> bool {
        if u.group == w.group {
            return false;
        }
        match (self.group_info(u.group), self.group_info(w.group)) {
            (GroupInfo::Variable { var: a, .. }, GroupInfo::Variable { var: b, .. }) => {
                self.variables_compatible(a, u.values[0], b, w.values[0])
            }
            _ => {
                let (uv, wv) = (self.group_vars(u.group), self.group_vars(w.group));
                uv.iter()
                    .zip(&u.values)
                    .all(|(var, x)| match wv.binary_search(var) {
                        Ok(j) => w.values[j] == *x,
                        Err(_) => true,
                    })
            }
        }
    }
}

/// The clique picked by an assignment that passes every test: in each
/// group, the vertex agreeing with the assignment.
#[derive(Debug, Clone)]
pub struct WitnessClique<'a> {
    csp: &'a RmCsp,
    assignment: Assignment,
}

impl WitnessClique<'_> {
    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    pub fn size(&self) -> usize {
        self.csp.group_count()
    }

    pub fn vertex(&self, g: usize) -> RmVertex {
        let values = self
            .csp
            .group_vars(g)
            .iter()
            .map(|&var| self.assignment.values[var as usize])
            .collect();
        RmVertex { group: g, values }
    }

    pub fn vertices(&self) -> impl Iterator<Item = RmVertex> + '_ {
        (0..self.size()).map(|g| self.vertex(g))
    }
}

/// Builds the clique of a yes-witness. Fails if the intended assignment
/// misses any test, since some group would then have no consistent vertex.
pub fn witness_clique<'a>(csp: &'a RmCsp, witness: &[usize]) -> Result<WitnessClique<'a>> {
    if !csp.source().is_witness(witness) {
        return Err(Error::precondition("not a witness of the source instance"));
    }
    let assignment = csp.intended_assignment(witness)?;
    for family in TestFamily::ALL {
        if let Some(t) = csp.first_failure(&assignment, family) {
            return Err(Error::VerificationFailed(format!(
                "intended assignment fails {} test {:?}",
                family.name(),
                t.anchor
            )));
        }
    }
    Ok(WitnessClique { csp, assignment })
}

/// One copy of every variable group: the layer carrying the neighbor and
/// wrap constraints.
#[derive(Debug, Clone, Copy)]
pub struct VariableLayer<'a> {
    csp: &'a RmCsp,
}

impl<'a> VariableLayer<'a> {
    pub fn new(csp: &'a RmCsp) -> Self {
        VariableLayer { csp }
    }
}

impl GroupedGraph for VariableLayer<'_> {
    type Vertex = RmVertex;

    fn group_count(&self) -> usize {
        self.csp.var_count() as usize
    }

    fn group_size(&self, _g: usize) -> u128 {
        self.csp.value_count() as u128
    }

    fn vertices(&self, g: usize) -> Box<dyn Iterator<Item = RmVertex> + '_> {
        self.csp.vertices(self.csp.variable_group(g as u64, 0))
    }

    fn group_of(&self, v: &RmVertex) -> usize {
        match self.csp.group_info(v.group) {
            GroupInfo::Variable { var, .. } => var as usize,
            GroupInfo::Test { .. } => unreachable!("layer holds variable vertices only"),
        }
    }

    fn adjacent(&self, u: &RmVertex, w: &RmVertex) -> bool {
        self.csp.adjacent(u, w)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoundnessCertificate {
    pub layer_groups: usize,
    /// Largest clique of the variable layer.
    pub layer_max_clique: usize,
    pub layer_max_exact: bool,
    /// Full cliques of the variable layer (assignments passing every
    /// neighbor and wrap test) that were checked against the other families.
    pub layer_full_cliques: u64,
    /// Whether the decision below is exact.
    pub decided: bool,
    /// Whether a clique covering all `8 p^(4k)` groups exists.
    pub full_clique_exists: bool,
    /// Families whose tests together rule out every candidate. When the
    /// variable layer has no full clique this is the neighbor and wrap pair.
    pub failing_families: Vec<TestFamily>,
}

/// Decides whether the whole graph has a clique hitting every group.
///
/// Such a clique is the same thing as an assignment passing every test. The
/// variable layer is searched first; each of its full cliques is an
/// assignment passing all neighbor and wrap tests, which is then checked
/// against the low-degree and linearity families.
pub fn certify_soundness(
    csp: &RmCsp,
    materialize_budget: u128,
    budget: u64,
) -> Result<SoundnessCertificate> {
    let layer = VariableLayer::new(csp);
    let (m, verts) = materialize(&layer, materialize_budget)?;
    let best = max_clique_materialized(&m, budget);
    let mut failing = Vec::new();
    let mut passing: Option<Assignment> = None;
    let mut checked = 0u64;
    let complete = for_each_full_clique(&m, budget, |picks| {
        checked += 1;
        let values = picks.iter().map(|&v| verts[v as usize].values[0]).collect();
        let asg = Assignment { values };
        let bad = [
            TestFamily::LowDegree,
            TestFamily::LinearityAlpha,
            TestFamily::LinearityBeta,
        ]
        .into_iter()
        .find(|&fam| csp.first_failure(&asg, fam).is_some());
        match bad {
            Some(fam) => {
                if !failing.contains(&fam) {
                    failing.push(fam);
                }
                true
            }
            None => {
                passing = Some(asg);
                false
            }
        }
    });
    if checked == 0 && complete {
        failing = vec![TestFamily::Neighbor, TestFamily::Wrap];
    }
    Ok(SoundnessCertificate {
        layer_groups: m.groups().len(),
        layer_max_clique: best.size(),
        layer_max_exact: best.exact,
        layer_full_cliques: checked,
        decided: complete || passing.is_some(),
        full_clique_exists: passing.is_some(),
        failing_families: failing,
    })
}
