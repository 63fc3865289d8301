//! Exact arithmetic over small prime fields.
//!
//! Residues are stored as their smallest non-negative representative, so a
//! "-1" in a gadget is the residue `p - 1` and equality is plain integer
//! equality.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

/// The field `F_p` for a small prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

/// Binary and unary operations accepted by [`PrimeField::apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Neg,
    Inv,
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField::F5
    }
}

impl PrimeField {
    pub const F5: PrimeField = PrimeField { p: 5 };

    /// Largest modulus accepted; keeps `a * b` inside a `u64`.
    pub const MAX_MODULUS: u32 = 1 << 20;

    pub fn new(p: u32) -> Result<Self> {
        if p > Self::MAX_MODULUS {
            return Err(Error::precondition(format!(
                "modulus {p} exceeds {}",
                Self::MAX_MODULUS
            )));
        }
        if !is_prime(p) {
            return Err(Error::precondition(format!("{p} is not prime")));
        }
        Ok(PrimeField { p })
    }

    /// Like [`PrimeField::new`] but additionally checks `p > 2d`, the
    /// condition under which the line test characterises degree-`d` maps.
    pub fn for_degree(p: u32, d: u32) -> Result<Self> {
        let f = Self::new(p)?;
        f.check_degree(d)?;
        Ok(f)
    }

    pub fn check_degree(&self, d: u32) -> Result<()> {
        if u64::from(self.p) <= 2 * u64::from(d) {
            return Err(Error::precondition(format!(
                "field size {} must exceed 2d = {}",
                self.p,
                2 * d
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.p
    }

    /// Reduces an arbitrary signed integer.
    #[inline]
    pub fn reduce(&self, x: i64) -> u32 {
        x.rem_euclid(i64::from(self.p)) as u32
    }

    #[inline]
    pub fn reduce_u64(&self, x: u64) -> u32 {
        (x % u64::from(self.p)) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((u64::from(a) * u64::from(b)) % u64::from(self.p)) as u32
    }

    pub fn pow(&self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(&self, a: u32) -> Result<u32> {
        if a.is_multiple_of(self.p) {
            return Err(Error::ZeroInverse { p: self.p });
        }
        Ok(self.pow(a, u64::from(self.p) - 2))
    }

    /// Applies `op` to reduced operands. Unary operations ignore `b`.
    pub fn apply(&self, op: FieldOp, a: u32, b: u32) -> Result<u32> {
        if a >= self.p || b >= self.p {
            return Err(Error::precondition("operands must be reduced"));
        }
        Ok(match op {
            FieldOp::Add => self.add(a, b),
            FieldOp::Sub => self.sub(a, b),
            FieldOp::Mul => self.mul(a, b),
            FieldOp::Neg => self.neg(a),
            FieldOp::Inv => self.inv(a)?,
        })
    }

    /// The residue of `-n` if `negative`, else of `n`.
    pub fn signed(&self, negative: bool, n: u64) -> u32 {
        let r = self.reduce_u64(n);
        if negative {
            self.neg(r)
        } else {
            r
        }
    }

    /// `p^e`, or `None` on overflow.
    pub fn checked_power(&self, e: u32) -> Option<u64> {
        u64::from(self.p).checked_pow(e)
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.p
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut i = 2u32;
    while u64::from(i) * u64::from(i) <= u64::from(p) {
        if p.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

/// A vector in `F_p^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldVec {
    field: PrimeField,
    entries: Vec<u32>,
}

impl FieldVec {
    /// Builds a vector, reducing every entry.
    pub fn new(field: PrimeField, entries: impl IntoIterator<Item = u32>) -> Self {
        let entries = entries
            .into_iter()
            .map(|x| field.reduce_u64(x.into()))
            .collect();
        FieldVec { field, entries }
    }

    pub fn from_signed(field: PrimeField, entries: &[i64]) -> Self {
        FieldVec {
            field,
            entries: entries.iter().map(|&x| field.reduce(x)).collect(),
        }
    }

    pub fn zeros(field: PrimeField, len: usize) -> Self {
        FieldVec {
            field,
            entries: vec![0; len],
        }
    }

    pub fn unit(field: PrimeField, len: usize, i: usize) -> Self {
        let mut v = Self::zeros(field, len);
        v.entries[i] = 1;
        v
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[inline]
    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize) -> u32 {
        self.entries[i]
    }

    pub fn set(&mut self, i: usize, value: u32) {
        self.entries[i] = self.field.reduce_u64(value.into());
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    fn check_same(&self, other: &FieldVec) -> Result<()> {
        if self.field != other.field {
            return Err(Error::precondition("vectors over different fields"));
        }
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &FieldVec) -> Result<FieldVec> {
        self.check_same(other)?;
        Ok(self.zip_with(other, |f, a, b| f.add(a, b)))
    }

    pub fn checked_sub(&self, other: &FieldVec) -> Result<FieldVec> {
        self.check_same(other)?;
        Ok(self.zip_with(other, |f, a, b| f.sub(a, b)))
    }

    pub fn dot(&self, other: &FieldVec) -> Result<u32> {
        self.check_same(other)?;
        let p = u64::from(self.field.modulus());
        let s = self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(0u64, |acc, (&a, &b)| {
                (acc + u64::from(a) * u64::from(b)) % p
            });
        Ok(s as u32)
    }

    pub fn scale(&self, a: u32) -> FieldVec {
        let f = self.field;
        FieldVec {
            field: f,
            entries: self.entries.iter().map(|&x| f.mul(a, x)).collect(),
        }
    }

    /// `self += a * other`, in place.
    pub fn add_scaled(&mut self, a: u32, other: &FieldVec) {
        assert_eq!(self.len(), other.len(), "dimension mismatch");
        let f = self.field;
        for (x, &y) in self.entries.iter_mut().zip(&other.entries) {
            *x = f.add(*x, f.mul(a, y));
        }
    }

    fn zip_with(&self, other: &FieldVec, op: impl Fn(&PrimeField, u32, u32) -> u32) -> FieldVec {
        let f = self.field;
        FieldVec {
            field: f,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| op(&f, a, b))
                .collect(),
        }
    }

    /// Parses whitespace-separated residues.
    pub fn parse(field: PrimeField, text: &str) -> std::result::Result<FieldVec, String> {
        let mut entries = Vec::new();
        for tok in text.split_whitespace() {
            let x: u32 = tok.parse().map_err(|_| format!("bad residue `{tok}`"))?;
            if x >= field.modulus() {
                return Err(format!("residue {x} not reduced mod {}", field.modulus()));
            }
            entries.push(x);
        }
        Ok(FieldVec { field, entries })
    }
}

impl fmt::Display for FieldVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl std::ops::Add for &FieldVec {
    type Output = FieldVec;

    /// # Panics
    /// Panics if the operands differ in length or field.
    fn add(self, rhs: &FieldVec) -> FieldVec {
        self.checked_add(rhs).expect("FieldVec addition")
    }
}

impl std::ops::Sub for &FieldVec {
    type Output = FieldVec;

    fn sub(self, rhs: &FieldVec) -> FieldVec {
        self.checked_sub(rhs).expect("FieldVec subtraction")
    }
}

impl std::ops::Neg for &FieldVec {
    type Output = FieldVec;

    fn neg(self) -> FieldVec {
        let f = self.field;
        FieldVec {
            field: f,
            entries: self.entries.iter().map(|&x| f.neg(x)).collect(),
        }
    }
}

/// A dense row-major matrix over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldMat {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FieldMat {
    pub fn new(field: PrimeField, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        let data = data
            .into_iter()
            .map(|x| field.reduce_u64(x.into()))
            .collect();
        Ok(FieldMat {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        FieldMat {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn random<R: Rng + ?Sized>(
        field: PrimeField,
        rows: usize,
        cols: usize,
        rng: &mut R,
    ) -> Self {
        let data = (0..rows * cols)
            .map(|_| rng.gen_range(0..field.modulus()))
            .collect();
        FieldMat {
            field,
            rows,
            cols,
            data,
        }
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    /// Row `r` as a slice of residues.
    #[inline]
    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn mul_vec(&self, v: &FieldVec) -> Result<FieldVec> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let p = u64::from(self.field.modulus());
        let entries = (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v.entries())
                    .fold(0u64, |acc, (&a, &b)| {
                        (acc + u64::from(a) * u64::from(b)) % p
                    }) as u32
            })
            .collect();
        Ok(FieldVec {
            field: self.field,
            entries,
        })
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack(mats: &[FieldMat]) -> Result<FieldMat> {
        let first = mats
            .first()
            .ok_or_else(|| Error::precondition("vstack of no matrices"))?;
        let mut data = Vec::new();
        let mut rows = 0;
        for m in mats {
            if m.cols != first.cols {
                return Err(Error::DimensionMismatch {
                    expected: first.cols,
                    found: m.cols,
                });
            }
            data.extend_from_slice(&m.data);
            rows += m.rows;
        }
        Ok(FieldMat {
            field: first.field,
            rows,
            cols: first.cols,
            data,
        })
    }

    /// Row echelon form; returns the rank and the pivot column of each
    /// pivot row.
    fn echelon(&self) -> (FieldMat, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(sel) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if sel != row {
                for c in 0..m.cols {
                    m.data.swap(sel * m.cols + c, row * m.cols + c);
                }
            }
            let inv = f.inv(m.get(row, col)).expect("pivot is nonzero");
            for c in 0..m.cols {
                let idx = row * m.cols + c;
                m.data[idx] = f.mul(m.data[idx], inv);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in 0..m.cols {
                    let v = f.mul(factor, m.get(row, c));
                    let idx = r * m.cols + c;
                    m.data[idx] = f.sub(m.data[idx], v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    /// A nonzero vector `v` with `self * v = 0`, if the kernel is nontrivial.
    pub fn kernel_vector(&self) -> Option<FieldVec> {
        let f = self.field;
        let (rref, pivots) = self.echelon();
        let free = (0..self.cols).find(|c| !pivots.contains(c))?;
        let mut v = FieldVec::zeros(f, self.cols);
        v.entries[free] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            v.entries[pc] = f.neg(rref.get(r, free));
        }
        Some(v)
    }

    pub fn transpose(&self) -> FieldMat {
        let mut out = FieldMat::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.get(r, c);
            }
        }
        out
    }
}

impl fmt::Display for FieldMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            for (i, x) in self.row(r).iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{x}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// `f(alpha, v) = (<alpha, A_1 v>, ..., <alpha, A_l v>)`.
pub fn bilinear_f(alpha: &FieldVec, v: &FieldVec, mats: &[FieldMat]) -> Result<FieldVec> {
    let field = alpha.field();
    let mut out = Vec::with_capacity(mats.len());
    for m in mats {
        if m.rows() != alpha.len() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: alpha.len(),
            });
        }
        out.push(alpha.dot(&m.mul_vec(v)?)?);
    }
    Ok(FieldVec {
        field,
        entries: out,
    })
}

/// Horner evaluation of a polynomial with vector coefficients, lowest
/// degree first.
pub fn poly_eval(coeffs: &[FieldVec], x: u32) -> Result<FieldVec> {
    let first = coeffs
        .first()
        .ok_or_else(|| Error::precondition("polynomial with no coefficients"))?;
    let field = first.field();
    if coeffs.len() > field.modulus() as usize {
        return Err(Error::precondition("degree must be below the field size"));
    }
    let x = field.reduce_u64(x.into());
    let mut acc = FieldVec::zeros(field, first.len());
    for c in coeffs.iter().rev() {
        if c.len() != first.len() {
            return Err(Error::DimensionMismatch {
                expected: first.len(),
                found: c.len(),
            });
        }
        acc = acc.scale(x);
        acc.add_scaled(1, c);
    }
    Ok(acc)
}

/// Packs vectors of `F_p^len` into `u64` symbols (base-`p` digits, entry 0
/// least significant). Used where vertex payloads must be compact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VecCodec {
    field: PrimeField,
    len: usize,
    size: u64,
}

impl VecCodec {
    pub fn new(field: PrimeField, len: usize) -> Result<Self> {
        let size = field.checked_power(len as u32).ok_or_else(|| {
            Error::precondition(format!(
                "F_{}^{len} does not fit in 64 bits",
                field.modulus()
            ))
        })?;
        Ok(VecCodec { field, len, size })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of distinct symbols, `p^len`.
    #[inline]
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn pack(&self, entries: &[u32]) -> u64 {
        debug_assert_eq!(entries.len(), self.len);
        let p = u64::from(self.field.modulus());
        entries
            .iter()
            .rev()
            .fold(0u64, |acc, &x| acc * p + u64::from(x))
    }

    pub fn unpack(&self, mut sym: u64) -> Vec<u32> {
        let p = u64::from(self.field.modulus());
        (0..self.len)
            .map(|_| {
                let d = (sym % p) as u32;
                sym /= p;
                d
            })
            .collect()
    }

    pub fn pack_vec(&self, v: &FieldVec) -> u64 {
        self.pack(v.entries())
    }

    pub fn unpack_vec(&self, sym: u64) -> FieldVec {
        FieldVec {
            field: self.field,
            entries: self.unpack(sym),
        }
    }

    /// Digit-wise `a + s * b`.
    pub fn add_scaled(&self, a: u64, s: u32, b: u64) -> u64 {
        let f = self.field;
        let p = u64::from(f.modulus());
        let (mut a, mut b) = (a, b);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.len {
            let da = (a % p) as u32;
            let db = (b % p) as u32;
            a /= p;
            b /= p;
            out += place * u64::from(f.add(da, f.mul(s, db)));
            place = place.wrapping_mul(p);
        }
        out
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        self.add_scaled(a, 1, b)
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add_scaled(a, self.field.neg(1), b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const F: PrimeField = PrimeField::F5;

    #[test]
    fn field_op_examples() {
        assert_eq!(F.apply(FieldOp::Add, 3, 4).unwrap(), 2);
        assert_eq!(F.apply(FieldOp::Neg, 1, 0).unwrap(), 4);
        // 2 * x = 1 mod 5 by exhaustive search
        let inv2 = (1..5).find(|x| (2 * x) % 5 == 1).unwrap();
        assert_eq!(F.apply(FieldOp::Inv, 2, 0).unwrap(), inv2);
        assert_eq!(inv2, 3);
        assert_eq!(
            F.apply(FieldOp::Inv, 0, 0),
            Err(Error::ZeroInverse { p: 5 })
        );
        assert!(F.apply(FieldOp::Add, 5, 0).is_err());
    }

    #[test]
    fn exhaustive_inverse_and_negation() {
        for a in 0..5 {
            assert_eq!(F.add(a, F.neg(a)), 0);
            if a != 0 {
                assert_eq!(F.mul(a, F.inv(a).unwrap()), 1);
            }
        }
    }

    #[test]
    fn rejects_composite_modulus() {
        assert!(PrimeField::new(9).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(7).is_ok());
        assert!(PrimeField::for_degree(5, 2).is_ok());
        assert!(PrimeField::for_degree(5, 3).is_err());
    }

    #[test]
    fn bilinear_examples() {
        let a1 = FieldMat::new(F, 1, 1, vec![2]).unwrap();
        let alpha = FieldVec::new(F, [3]);
        let v = FieldVec::new(F, [4]);
        assert_eq!(
            bilinear_f(&alpha, &v, &[a1.clone()]).unwrap().entries(),
            &[4]
        );
        let zero = FieldVec::zeros(F, 1);
        assert!(bilinear_f(&zero, &v, &[a1.clone()]).unwrap().is_zero());
        assert!(bilinear_f(&alpha, &zero, &[a1.clone()]).unwrap().is_zero());
        let bad = FieldVec::zeros(F, 2);
        assert!(bilinear_f(&bad, &v, &[a1]).is_err());
    }

    #[test]
    fn bilinearity_exhaustive_small() {
        // k = d = l = 2 over F_5, one fixed pair of matrices, all alpha/v.
        let mats = [
            FieldMat::new(F, 2, 2, vec![1, 2, 3, 4]).unwrap(),
            FieldMat::new(F, 2, 2, vec![0, 4, 2, 1]).unwrap(),
        ];
        let all: Vec<FieldVec> = (0..25).map(|i| FieldVec::new(F, [i % 5, i / 5])).collect();
        for a in &all {
            for a2 in &all {
                for v in &all {
                    let lhs = bilinear_f(&(a + a2), v, &mats).unwrap();
                    let rhs =
                        &bilinear_f(a, v, &mats).unwrap() + &bilinear_f(a2, v, &mats).unwrap();
                    assert_eq!(lhs, rhs);
                    let lhs = bilinear_f(v, &(a + a2), &mats).unwrap();
                    let rhs =
                        &bilinear_f(v, a, &mats).unwrap() + &bilinear_f(v, a2, &mats).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn poly_eval_examples() {
        let c = FieldVec::new(F, [3, 1]);
        assert_eq!(poly_eval(&[c.clone()], 4).unwrap(), c);
        // 3x + 1 at x = 2 is 7 = 2 mod 5
        let coeffs = [FieldVec::new(F, [1]), FieldVec::new(F, [3])];
        assert_eq!(poly_eval(&coeffs, 2).unwrap().entries(), &[2]);
        assert_eq!(poly_eval(&coeffs, 0).unwrap().entries(), &[1]);
        let too_long: Vec<FieldVec> = (0..6).map(|_| FieldVec::zeros(F, 1)).collect();
        assert!(poly_eval(&too_long, 1).is_err());
    }

    #[test]
    fn rank_and_kernel() {
        let m = FieldMat::new(F, 2, 3, vec![1, 2, 3, 2, 4, 2]).unwrap();
        assert_eq!(m.rank(), 2);
        let k = m.kernel_vector().unwrap();
        assert!(!k.is_zero());
        assert!(m.mul_vec(&k).unwrap().is_zero());
        let id = FieldMat::new(F, 2, 2, vec![1, 0, 0, 1]).unwrap();
        assert!(id.kernel_vector().is_none());
    }

    #[test]
    fn codec_arithmetic_matches_vectors() {
        let c = VecCodec::new(F, 3).unwrap();
        assert_eq!(c.size(), 125);
        for a in 0..125 {
            for b in [0u64, 1, 7, 124] {
                let va = c.unpack_vec(a);
                let vb = c.unpack_vec(b);
                assert_eq!(c.pack_vec(&va), a);
                assert_eq!(c.unpack_vec(c.add(a, b)), &va + &vb);
                assert_eq!(c.unpack_vec(c.sub(a, b)), &va - &vb);
            }
        }
    }
}
