//! Regular multigraphs given by rotation maps, their spectral gap, random
//! walks that stay inside a set, and the walk product of grouped graphs.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grouped::GroupedGraph;
use crate::scalar::{Fraction, Real};

/// Above this many vertices [`spectral_lambda`] switches from a dense
/// eigendecomposition to power iteration.
pub const DENSE_EIGEN_LIMIT: usize = 2048;
pub const POWER_TOLERANCE: f64 = 1e-10;
pub const POWER_MAX_ITERATIONS: usize = 100_000;
pub const DEFAULT_WALK_BUDGET: u128 = 10_000_000;
pub const DEFAULT_PRODUCT_GROUP_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaMethod {
    DenseEigen,
    PowerIteration { iterations: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum<T> {
    /// Largest `|Av|` over unit `v` orthogonal to the all-ones vector.
    pub lambda: T,
    pub method: LambdaMethod,
}

/// A `d`-regular multigraph. `rotation(v, i) = (w, j)` means the `i`-th
/// edge at `v` is the `j`-th edge at `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularGraph {
    n: usize,
    d: usize,
    rot: Vec<(u32, u32)>,
    spectrum: Spectrum<f64>,
}

impl RegularGraph {
    /// Checks that the map is an involution and computes `lambda`.
    pub fn from_rotation(n: usize, d: usize, rot: Vec<(u32, u32)>) -> Result<Self> {
        if rot.len() != n * d {
            return Err(Error::DimensionMismatch {
                expected: n * d,
                found: rot.len(),
            });
        }
        for (i, &(w, j)) in rot.iter().enumerate() {
            let (w, j) = (w as usize, j as usize);
            if w >= n || j >= d || rot[w * d + j] != ((i / d) as u32, (i % d) as u32) {
                return Err(Error::precondition(format!(
                    "rotation map is not an involution at ({}, {})",
                    i / d,
                    i % d
                )));
            }
        }
        let mut g = RegularGraph {
            n,
            d,
            rot,
            spectrum: Spectrum {
                lambda: 0.0,
                method: LambdaMethod::DenseEigen,
            },
        };
        g.spectrum = spectral_lambda::<f64>(&g)?;
        Ok(g)
    }

    /// `K_n`: port `i` at `v` leads to the `i`-th other vertex.
    pub fn complete(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::precondition("K_n needs n >= 2"));
        }
        let d = n - 1;
        let port = |from: usize, to: usize| if to < from { to } else { to - 1 };
        let mut rot = Vec::with_capacity(n * d);
        for v in 0..n {
            for i in 0..d {
                let w = if i < v { i } else { i + 1 };
                rot.push((w as u32, port(w, v) as u32));
            }
        }
        Self::from_rotation(n, d, rot)
    }

    /// `C_n`: port 0 goes to `v + 1`, port 1 to `v - 1`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::precondition("C_n needs n >= 3"));
        }
        let rot = (0..n)
            .flat_map(|v| [(((v + 1) % n) as u32, 1), (((v + n - 1) % n) as u32, 0)])
            .collect();
        Self::from_rotation(n, 2, rot)
    }

    /// Vertices of `b` follow those of `a`.
    pub fn disjoint_union(a: &RegularGraph, b: &RegularGraph) -> Result<Self> {
        if a.d != b.d {
            return Err(Error::precondition("both graphs need the same degree"));
        }
        let shift = a.n as u32;
        let rot = a
            .rot
            .iter()
            .copied()
            .chain(b.rot.iter().map(|&(w, j)| (w + shift, j)))
            .collect();
        Self::from_rotation(a.n + b.n, a.d, rot)
    }

    /// Configuration model: the `n d` half-edges are shuffled and paired
    /// up. Self-loops and parallel edges are kept.
    pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Self> {
        if !(n * d).is_multiple_of(2) {
            return Err(Error::precondition(format!("n d = {} must be even", n * d)));
        }
        if n <= d {
            return Err(Error::precondition("need n > d"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut half: Vec<u32> = (0..(n * d) as u32).collect();
        half.shuffle(&mut rng);
        let mut rot = vec![(0u32, 0u32); n * d];
        for pair in half.chunks(2) {
            let (a, b) = (pair[0] as usize, pair[1] as usize);
            rot[a] = ((b / d) as u32, (b % d) as u32);
            rot[b] = ((a / d) as u32, (a % d) as u32);
        }
        Self::from_rotation(n, d, rot)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rotate(&self, v: usize, port: usize) -> (usize, usize) {
        let (w, j) = self.rot[v * self.d + port];
        (w as usize, j as usize)
    }

    pub fn neighbor(&self, v: usize, port: usize) -> usize {
        self.rot[v * self.d + port].0 as usize
    }

    pub fn lambda(&self) -> f64 {
        self.spectrum.lambda
    }

    pub fn spectrum(&self) -> Spectrum<f64> {
        self.spectrum
    }

    /// Normalized adjacency matrix: entry `(v, w)` is the number of ports
    /// at `v` leading to `w`, divided by `d`.
    pub fn normalized_adjacency<T: Real>(&self) -> DMatrix<T> {
        let mut a = DMatrix::<T>::zeros(self.n, self.n);
        let step = T::of(1.0 / self.d as f64);
        for v in 0..self.n {
            for p in 0..self.d {
                a[(v, self.neighbor(v, p))] += step;
            }
        }
        a
    }

    /// `n d` header, then one `u p v q` line per port.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.d);
        for v in 0..self.n {
            for p in 0..self.d {
                let (w, q) = self.rotate(v, p);
                let _ = writeln!(s, "{v} {p} {w} {q}");
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let nums = |line: usize, l: &str, count: usize| -> Result<Vec<usize>> {
            let v: Vec<usize> = l
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::parse(line, format!("bad number `{t}`")))
                })
                .collect::<Result<_>>()?;
            if v.len() != count {
                return Err(Error::parse(line, format!("expected {count} numbers")));
            }
            Ok(v)
        };
        let (hl, header) = lines
            .next()
            .ok_or_else(|| Error::parse(0, "empty graph file"))?;
        let h = nums(hl, header, 2)?;
        let (n, d) = (h[0], h[1]);
        let mut rot = vec![None; n * d];
        for (line, l) in lines {
            let x = nums(line, l, 4)?;
            if x[0] >= n || x[1] >= d || x[2] >= n || x[3] >= d {
                return Err(Error::parse(line, "vertex or port out of range"));
            }
            let slot = &mut rot[x[0] * d + x[1]];
            if slot.is_some() {
                return Err(Error::parse(line, "port listed twice"));
            }
            *slot = Some((x[2] as u32, x[3] as u32));
        }
        let rot = rot
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                r.ok_or_else(|| {
                    Error::parse(0, format!("port {} of vertex {} missing", i % d, i / d))
                })
            })
            .collect::<Result<_>>()?;
        Self::from_rotation(n, d, rot)
    }
}

/// `lambda(G)`: the largest absolute eigenvalue of `A - J/n`, where `J/n`
/// removes the all-ones direction. Dense for `n <= DENSE_EIGEN_LIMIT`,
/// otherwise power iteration on `(A - J/n)^2`.
pub fn spectral_lambda<T: Real>(g: &RegularGraph) -> Result<Spectrum<T>> {
    if g.n <= DENSE_EIGEN_LIMIT {
        let mut a = g.normalized_adjacency::<T>();
        let shift = T::of(1.0 / g.n as f64);
        a.apply(|x| *x -= shift);
        let eig = a.symmetric_eigenvalues();
        let lambda = eig
            .iter()
            .fold(T::of(0.0), |m, &x| Float::max(m, Float::abs(x)));
        return Ok(Spectrum {
            lambda: Float::min(lambda, T::of(1.0)),
            method: LambdaMethod::DenseEigen,
        });
    }
    power_lambda(g)
}

fn power_lambda<T: Real>(g: &RegularGraph) -> Result<Spectrum<T>> {
    let n = g.n;
    let inv_d = T::of(1.0 / g.d as f64);
    let apply = |x: &DVector<T>| -> DVector<T> {
        let mut y = DVector::<T>::zeros(n);
        for v in 0..n {
            let mut s = T::of(0.0);
            for p in 0..g.d {
                s += x[g.neighbor(v, p)];
            }
            y[v] = s * inv_d;
        }
        y
    };
    let project = |x: &mut DVector<T>| {
        let mean = x.sum() / T::of(n as f64);
        x.apply(|e| *e -= mean);
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut x = DVector::<T>::from_fn(n, |_, _| T::of(rng.gen_range(-1.0..1.0)));
    project(&mut x);
    let mut mu = T::of(0.0);
    let mut residual = f64::INFINITY;
    for it in 1..=POWER_MAX_ITERATIONS {
        let norm = x.norm();
        if norm == T::of(0.0) {
            return Ok(Spectrum {
                lambda: T::of(0.0),
                method: LambdaMethod::PowerIteration { iterations: it },
            });
        }
        x /= norm;
        let mut y = apply(&apply(&x));
        project(&mut y);
        let next = x.dot(&y);
        residual = (y.clone() - x.clone() * next).norm().to_f64();
        let converged =
            Float::abs(next - mu).to_f64() < POWER_TOLERANCE && residual < POWER_TOLERANCE.sqrt();
        mu = next;
        x = y;
        if converged {
            return Ok(Spectrum {
                lambda: Float::min(Float::sqrt(Float::max(mu, T::of(0.0))), T::of(1.0)),
                method: LambdaMethod::PowerIteration { iterations: it },
            });
        }
    }
    Err(Error::NoConvergence { residual })
}

/// `((1 - lambda) sqrt(eps) + lambda)^(t-1)`.
pub fn walk_bound<T: Real>(lambda: T, eps: T, t: usize) -> T {
    let base = (T::of(1.0) - lambda) * Float::sqrt(eps) + lambda;
    Float::powi(base, t.saturating_sub(1) as i32)
}

/// `k d^(t-1) ((1 - lambda) sqrt(eps) + lambda)^(t-1)`.
pub fn soundness_bound<T: Real>(k: usize, d: usize, t: usize, lambda: T, eps: T) -> T {
    let groups = T::of(k as f64) * Float::powi(T::of(d as f64), t.saturating_sub(1) as i32);
    groups * walk_bound(lambda, eps, t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WalkMode {
    Exact { budget: u128 },
    MonteCarlo { trials: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WalkFraction {
    Exact(Fraction),
    Estimated {
        value: f64,
        /// Half-width of the normal-approximation 95% interval.
        half_width: f64,
        trials: u64,
    },
}

impl WalkFraction {
    pub fn as_f64(&self) -> f64 {
        match *self {
            WalkFraction::Exact(f) => crate::scalar::fraction_to_f64(f),
            WalkFraction::Estimated { value, .. } => value,
        }
    }
}

/// Fraction of labeled length-`t` walks (uniform start, uniform port at
/// each step) whose `t` vertices all lie in `set`. The exact mode counts
/// walks by dynamic programming over the `n d^(t-1)` labeled walks.
pub fn walk_hitting_fraction(
    g: &RegularGraph,
    set: &[bool],
    t: usize,
    mode: WalkMode,
) -> Result<WalkFraction> {
    if set.len() != g.n {
        return Err(Error::DimensionMismatch {
            expected: g.n,
            found: set.len(),
        });
    }
    if t == 0 {
        return Err(Error::precondition("walks have at least one vertex"));
    }
    match mode {
        WalkMode::Exact { budget } => {
            let total = (1..t).try_fold(g.n as u128, |acc, _| acc.checked_mul(g.d as u128));
            let total = match total {
                Some(x) if x <= budget && x <= u64::MAX as u128 => x as u64,
                other => {
                    return Err(Error::budget(
                        "labeled walks",
                        other.unwrap_or(u128::MAX),
                        budget,
                    ))
                }
            };
            let mut count: Vec<u64> = set.iter().map(|&b| u64::from(b)).collect();
            for _ in 1..t {
                let mut next = vec![0u64; g.n];
                for v in 0..g.n {
                    if count[v] == 0 {
                        continue;
                    }
                    for p in 0..g.d {
                        let w = g.neighbor(v, p);
                        if set[w] {
                            next[w] += count[v];
                        }
                    }
                }
                count = next;
            }
            Ok(WalkFraction::Exact(Fraction::new(
                count.iter().sum(),
                total,
            )))
        }
        WalkMode::MonteCarlo { trials, seed } => {
            if trials == 0 {
                return Err(Error::precondition("need at least one trial"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut hits = 0u64;
            for _ in 0..trials {
                let mut v = rng.gen_range(0..g.n);
                let mut inside = set[v];
                for _ in 1..t {
                    if !inside {
                        break;
                    }
                    v = g.neighbor(v, rng.gen_range(0..g.d));
                    inside = set[v];
                }
                hits += u64::from(inside);
            }
            let value = hits as f64 / trials as f64;
            Ok(WalkFraction::Estimated {
                value,
                half_width: 1.96 * (value * (1.0 - value) / trials as f64).sqrt(),
                trials,
            })
        }
    }
}

/// All labeled walks with `t` vertices, indexed by start vertex followed by
/// the port digits (first step most significant).
pub fn labeled_walks(g: &RegularGraph, t: usize, budget: u128) -> Result<Vec<Vec<usize>>> {
    let total = (1..t.max(1)).fold(g.n as u128, |acc, _| acc.saturating_mul(g.d as u128));
    if total > budget {
        return Err(Error::budget("labeled walks", total, budget));
    }
    let mut walks: Vec<Vec<usize>> = (0..g.n).map(|v| vec![v]).collect();
    for _ in 1..t {
        walks = walks
            .into_iter()
            .flat_map(|w| {
                let last = *w.last().expect("walks are nonempty");
                (0..g.d).map(move |p| {
                    let mut next = w.clone();
                    next.push(g.neighbor(last, p));
                    next
                })
            })
            .collect();
    }
    Ok(walks)
}

/// Groups of a product: one per walk (or per tuple of source groups), each
/// holding all tuples of source vertices along it. Two tuples in different
/// groups are adjacent when every pair of distinct vertices in their union
/// is adjacent in the source.
#[derive(Debug, Clone)]
pub struct ProductGraph<'a, G: GroupedGraph> {
    base: &'a G,
    index: Vec<Vec<usize>>,
}

impl<'a, G: GroupedGraph> ProductGraph<'a, G> {
    /// Walk product over `h`, whose vertices are the groups of `base`.
    pub fn expander(base: &'a G, h: &RegularGraph, t: usize, group_budget: u128) -> Result<Self> {
        if h.n() != base.group_count() {
            return Err(Error::DimensionMismatch {
                expected: base.group_count(),
                found: h.n(),
            });
        }
        if t == 0 {
            return Err(Error::precondition("t must be at least 1"));
        }
        Ok(ProductGraph {
            base,
            index: labeled_walks(h, t, group_budget)?,
        })
    }

    /// Plain tensor power: one group per `t`-tuple of source groups.
    pub fn tensor(base: &'a G, t: usize, group_budget: u128) -> Result<Self> {
        let k = base.group_count();
        let total = (0..t).fold(1u128, |acc, _| acc.saturating_mul(k as u128));
        if total > group_budget {
            return Err(Error::budget("product groups", total, group_budget));
        }
        if t == 0 {
            return Err(Error::precondition("t must be at least 1"));
        }
        let mut index: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..t {
            index = index
                .into_iter()
                .flat_map(|w| {
                    (0..k).map(move |c| {
                        let mut next = w.clone();
                        next.push(c);
                        next
                    })
                })
                .collect();
        }
        Ok(ProductGraph { base, index })
    }

    pub fn base(&self) -> &G {
        self.base
    }

    /// Source groups along product group `g`.
    pub fn walk(&self, g: usize) -> &[usize] {
        &self.index[g]
    }

    /// Union of two vertex tuples is a clique of the source.
    pub fn union_is_clique(&self, a: &[G::Vertex], b: &[G::Vertex]) -> bool {
        let all: Vec<&G::Vertex> = a.iter().chain(b).collect();
        all.iter().enumerate().all(|(i, x)| {
            all[i + 1..]
                .iter()
                .all(|y| x == y || self.base.adjacent(x, y))
        })
    }

    /// Product vertex picked by a full clique of the source, given as one
    /// vertex per source group.
    pub fn lift(&self, g: usize, per_group: &[G::Vertex]) -> ProductVertex<G::Vertex> {
        ProductVertex {
            group: g,
            parts: self.index[g]
                .iter()
                .map(|&c| per_group[c].clone())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductVertex<V> {
    pub group: usize,
    pub parts: Vec<V>,
}

impl<G: GroupedGraph> GroupedGraph for ProductGraph<'_, G> {
    type Vertex = ProductVertex<G::Vertex>;

    fn group_count(&self) -> usize {
        self.index.len()
    }

    fn group_size(&self, g: usize) -> u128 {
        self.index[g]
            .iter()
            .fold(1u128, |acc, &c| acc.saturating_mul(self.base.group_size(c)))
    }

    fn vertices(&self, g: usize) -> Box<dyn Iterator<Item = Self::Vertex> + '_> {
        let mut tuples: Box<dyn Iterator<Item = Vec<G::Vertex>> + '_> =
            Box::new(std::iter::once(Vec::new()));
        for &c in &self.index[g] {
            let base = self.base;
            tuples = Box::new(tuples.flat_map(move |prefix| {
                base.vertices(c).map(move |v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            }));
        }
        Box::new(tuples.map(move |parts| ProductVertex { group: g, parts }))
    }

    fn group_of(&self, v: &Self::Vertex) -> usize {
        v.group
    }

    fn adjacent(&self, u: &Self::Vertex, w: &Self::Vertex) -> bool {
        u.group != w.group && self.union_is_clique(&u.parts, &w.parts)
    }
}
