//! Clique to biclique, disperser-based biclique compression, the
//! Kővári–Sós–Turán bound and the densest-subgraph view of a biclique
//! instance.

use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grouped::{BipartiteGroupedGraph, GroupedGraph, Side};
use crate::scalar::Real;

pub const DEFAULT_DISPERSER_BUDGET: u128 = 10_000_000;

/// Both sides are copies of the source vertices. Across different groups
/// adjacency is inherited; inside one group only a vertex and its own copy
/// are adjacent.
#[derive(Debug, Clone, Copy)]
pub struct CliqueBiclique<'a, G: GroupedGraph> {
    base: &'a G,
}

impl<'a, G: GroupedGraph> CliqueBiclique<'a, G> {
    pub fn new(base: &'a G) -> Self {
        CliqueBiclique { base }
    }

    pub fn base(&self) -> &G {
        self.base
    }
}

impl<G: GroupedGraph> BipartiteGroupedGraph for CliqueBiclique<'_, G> {
    type Vertex = G::Vertex;

    fn groups(&self, _side: Side) -> usize {
        self.base.group_count()
    }

    fn group_size(&self, _side: Side, g: usize) -> u128 {
        self.base.group_size(g)
    }

    fn vertices(&self, _side: Side, g: usize) -> Box<dyn Iterator<Item = G::Vertex> + '_> {
        self.base.vertices(g)
    }

    fn cross_adjacent(&self, l: &G::Vertex, r: &G::Vertex) -> bool {
        if self.base.group_of(l) == self.base.group_of(r) {
            l == r
        } else {
            self.base.adjacent(l, r)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verification {
    Unverified,
    Exact,
    /// No violation among `trials` sampled `r`-subsets; `rate_upper` is the
    /// 95% upper bound on the violating fraction.
    MonteCarlo {
        trials: u64,
        rate_upper: f64,
    },
}

/// `k` subsets of `[m]`, each of size `ell`, such that (once verified) the
/// union of any `r` of them has at least `(1 - eps) m` elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Disperser {
    pub m: usize,
    pub k: usize,
    pub ell: usize,
    pub r: usize,
    pub eps: f64,
    /// Sorted subsets.
    pub subsets: Vec<Vec<usize>>,
    pub verified: Verification,
    /// `ceil(3m / (eps r))` before any clamping.
    pub ell_formula: usize,
    pub clamped: bool,
}

/// `ceil(3m / (eps r))`.
pub fn disperser_ell(m: usize, r: usize, eps: f64) -> usize {
    (3.0 * m as f64 / (eps * r as f64) - 1e-9).ceil() as usize
}

/// Draws `k` uniformly random `ell`-subsets of `[m]` with
/// `ell = ceil(3m / (eps r))`. Requires `ell <= m` and `ln k <= m / r`.
pub fn make_disperser(m: usize, k: usize, r: usize, eps: f64, seed: u64) -> Result<Disperser> {
    build_disperser(m, k, r, eps, seed, false)
}

/// Like [`make_disperser`], but an `ell` above `m` is clamped to `m` and
/// recorded in [`Disperser::clamped`].
pub fn make_disperser_clamped(
    m: usize,
    k: usize,
    r: usize,
    eps: f64,
    seed: u64,
) -> Result<Disperser> {
    build_disperser(m, k, r, eps, seed, true)
}

fn build_disperser(
    m: usize,
    k: usize,
    r: usize,
    eps: f64,
    seed: u64,
    clamp: bool,
) -> Result<Disperser> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::precondition("eps must lie in (0, 1)"));
    }
    if m == 0 || k == 0 || r == 0 || r > k {
        return Err(Error::precondition("need m, k >= 1 and 1 <= r <= k"));
    }
    if (k as f64).ln() > m as f64 / r as f64 {
        return Err(Error::precondition(format!(
            "ln k = {:.4} exceeds m / r = {:.4}",
            (k as f64).ln(),
            m as f64 / r as f64
        )));
    }
    let ell_formula = disperser_ell(m, r, eps);
    let clamped = ell_formula > m;
    if clamped && !clamp {
        return Err(Error::precondition(format!(
            "ell = {ell_formula} exceeds m = {m}"
        )));
    }
    let ell = ell_formula.min(m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let subsets = (0..k)
        .map(|_| {
            let mut s = sample(&mut rng, m, ell).into_vec();
            s.sort_unstable();
            s
        })
        .collect();
    Ok(Disperser {
        m,
        k,
        ell,
        r,
        eps,
        subsets,
        verified: Verification::Unverified,
        ell_formula,
        clamped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DisperserMode {
    Exact { budget: u128 },
    MonteCarlo { trials: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisperserReport {
    pub checked: u64,
    pub violations: u64,
    /// First violating choice of `r` subset indices.
    pub first_violation: Option<Vec<usize>>,
    pub min_union: usize,
    pub verification: Verification,
}

fn binomial(n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| {
        acc.saturating_mul((n - i) as u128) / (i + 1) as u128
    })
}

impl Disperser {
    /// Smallest union size allowed: `ceil((1 - eps) m)`.
    pub fn threshold(&self) -> usize {
        ((1.0 - self.eps) * self.m as f64 - 1e-9).ceil().max(0.0) as usize
    }

    fn masks(&self) -> Vec<Vec<u64>> {
        let words = self.m.div_ceil(64);
        self.subsets
            .iter()
            .map(|s| {
                let mut w = vec![0u64; words];
                for &x in s {
                    w[x / 64] |= 1 << (x % 64);
                }
                w
            })
            .collect()
    }

    /// Checks unions of `r` subsets, all of them or a random sample, and
    /// records the outcome in [`Disperser::verified`].
    pub fn verify(&mut self, mode: DisperserMode) -> Result<DisperserReport> {
        let report = verify_disperser(self, mode)?;
        self.verified = report.verification;
        Ok(report)
    }

    pub fn to_text(&self) -> String {
        let verified = match self.verified {
            Verification::Unverified => "unverified".to_string(),
            Verification::Exact => "exact".to_string(),
            Verification::MonteCarlo { trials, .. } => format!("montecarlo {trials}"),
        };
        let mut s = format!(
            "disperser\nm {}\nk {}\nell {}\nr {}\neps {}\nverified {}\n",
            self.m, self.k, self.ell, self.r, self.eps, verified
        );
        for sub in &self.subsets {
            let row: Vec<String> = sub.iter().map(usize::to_string).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }

    /// Reads the subsets back. The verification status is not trusted: the
    /// result is unverified.
    pub fn from_text(text: &str) -> Result<Self> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        let header = |i: usize, key: &str| -> Result<&str> {
            let (n, l) = *lines
                .get(i)
                .ok_or_else(|| Error::parse(0, format!("missing `{key}`")))?;
            l.strip_prefix(key)
                .map(str::trim)
                .ok_or_else(|| Error::parse(n, format!("expected `{key}`")))
        };
        if lines.first().map(|l| l.1) != Some("disperser") {
            return Err(Error::parse(1, "expected `disperser`"));
        }
        let num = |i: usize, key: &str| -> Result<usize> {
            header(i, key)?
                .parse()
                .map_err(|_| Error::parse(lines[i].0, format!("bad `{key}` value")))
        };
        let (m, k, ell, r) = (num(1, "m")?, num(2, "k")?, num(3, "ell")?, num(4, "r")?);
        let eps: f64 = header(5, "eps")?
            .parse()
            .map_err(|_| Error::parse(lines[5].0, "bad `eps` value"))?;
        header(6, "verified")?;
        if lines.len() != 7 + k {
            return Err(Error::parse(0, format!("expected {k} subsets")));
        }
        let mut subsets = Vec::with_capacity(k);
        for &(n, l) in &lines[7..] {
            let s: Vec<usize> = l
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::parse(n, format!("bad element `{t}`")))
                })
                .collect::<Result<_>>()?;
            if s.len() != ell || s.iter().any(|&x| x >= m) || s.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::parse(
                    n,
                    format!("expected {ell} increasing elements below {m}"),
                ));
            }
            subsets.push(s);
        }
        Ok(Disperser {
            m,
            k,
            ell,
            r,
            eps,
            subsets,
            verified: Verification::Unverified,
            ell_formula: disperser_ell(m, r, eps),
            clamped: ell < disperser_ell(m, r, eps),
        })
    }
}

/// Exact mode walks every `r`-subset of the `k` sets; Monte Carlo mode
/// samples `r`-subsets uniformly.
pub fn verify_disperser(d: &Disperser, mode: DisperserMode) -> Result<DisperserReport> {
    let masks = d.masks();
    let threshold = d.threshold();
    let union_size = |choice: &[usize]| -> usize {
        (0..d.m.div_ceil(64))
            .map(|w| {
                choice
                    .iter()
                    .fold(0u64, |acc, &i| acc | masks[i][w])
                    .count_ones() as usize
            })
            .sum()
    };
    let mut report = DisperserReport {
        checked: 0,
        violations: 0,
        first_violation: None,
        min_union: d.m,
        verification: Verification::Unverified,
    };
    let record = |choice: &[usize], report: &mut DisperserReport| {
        let u = union_size(choice);
        report.checked += 1;
        report.min_union = report.min_union.min(u);
        if u < threshold {
            report.violations += 1;
            if report.first_violation.is_none() {
                report.first_violation = Some(choice.to_vec());
            }
        }
    };
    match mode {
        DisperserMode::Exact { budget } => {
            let total = binomial(d.k as u64, d.r as u64);
            if total > budget {
                return Err(Error::budget("r-subsets", total, budget));
            }
            let mut choice: Vec<usize> = (0..d.r).collect();
            loop {
                record(&choice, &mut report);
                let Some(i) = (0..d.r).rev().find(|&i| choice[i] < d.k - d.r + i) else {
                    break;
                };
                choice[i] += 1;
                for j in i + 1..d.r {
                    choice[j] = choice[j - 1] + 1;
                }
            }
            if report.violations == 0 {
                report.verification = Verification::Exact;
            }
        }
        DisperserMode::MonteCarlo { trials, seed } => {
            if trials == 0 {
                return Err(Error::precondition("need at least one trial"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..trials {
                let mut choice = sample(&mut rng, d.k, d.r).into_vec();
                choice.sort_unstable();
                record(&choice, &mut report);
            }
            if report.violations == 0 {
                report.verification = Verification::MonteCarlo {
                    trials,
                    rate_upper: 3.0 / trials as f64,
                };
            }
        }
    }
    Ok(report)
}

/// A tuple vertex of a compressed instance: one source vertex for each
/// source group listed by the disperser subset of `group`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TupleVertex<V> {
    pub group: usize,
    pub parts: Vec<V>,
}

/// Groups are the disperser subsets on each side; a left and a right tuple
/// are adjacent when their constituents form a complete bipartite graph in
/// the source.
#[derive(Debug, Clone)]
pub struct CompressedBiclique<'a, B: BipartiteGroupedGraph> {
    base: &'a B,
    disperser: &'a Disperser,
}

impl<'a, B: BipartiteGroupedGraph> CompressedBiclique<'a, B> {
    pub fn new(base: &'a B, disperser: &'a Disperser) -> Result<Self> {
        if disperser.verified == Verification::Unverified {
            return Err(Error::precondition("the disperser has not been verified"));
        }
        let k = base.groups(Side::Left);
        if base.groups(Side::Right) != k || disperser.m != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: disperser.m,
            });
        }
        Ok(CompressedBiclique { base, disperser })
    }

    pub fn disperser(&self) -> &Disperser {
        self.disperser
    }

    /// The tuple of group `g` agreeing with one chosen source vertex per
    /// source group.
    pub fn restrict(&self, g: usize, per_group: &[B::Vertex]) -> TupleVertex<B::Vertex> {
        TupleVertex {
            group: g,
            parts: self.disperser.subsets[g]
                .iter()
                .map(|&i| per_group[i].clone())
                .collect(),
        }
    }
}

impl<B: BipartiteGroupedGraph> BipartiteGroupedGraph for CompressedBiclique<'_, B> {
    type Vertex = TupleVertex<B::Vertex>;

    fn groups(&self, _side: Side) -> usize {
        self.disperser.k
    }

    fn group_size(&self, side: Side, g: usize) -> u128 {
        self.disperser.subsets[g].iter().fold(1u128, |acc, &i| {
            acc.saturating_mul(self.base.group_size(side, i))
        })
    }

    fn vertices(&self, side: Side, g: usize) -> Box<dyn Iterator<Item = Self::Vertex> + '_> {
        let mut tuples: Box<dyn Iterator<Item = Vec<B::Vertex>> + '_> =
            Box::new(std::iter::once(Vec::new()));
        for &i in &self.disperser.subsets[g] {
            let base = self.base;
            tuples = Box::new(tuples.flat_map(move |prefix| {
                base.vertices(side, i).map(move |v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            }));
        }
        Box::new(tuples.map(move |parts| TupleVertex { group: g, parts }))
    }

    fn cross_adjacent(&self, l: &Self::Vertex, r: &Self::Vertex) -> bool {
        l.parts
            .iter()
            .all(|a| r.parts.iter().all(|b| self.base.cross_adjacent(a, b)))
    }
}

/// Source vertices recovered from a biclique of tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedBiclique<V> {
    /// One vertex per covered source group, `(group, vertex)`.
    pub left: Vec<(usize, V)>,
    pub right: Vec<(usize, V)>,
    /// Every cross pair of the recovered vertices is adjacent in the source.
    pub is_biclique: bool,
}

/// Unions the constituents of a tuple biclique. For each source group the
/// first vertex met is kept; the union itself is checked for being a
/// biclique before the choice is made.
pub fn decode_biclique<B: BipartiteGroupedGraph>(
    c: &CompressedBiclique<'_, B>,
    left: &[TupleVertex<B::Vertex>],
    right: &[TupleVertex<B::Vertex>],
) -> DecodedBiclique<B::Vertex> {
    let unpack = |tuples: &[TupleVertex<B::Vertex>]| -> (Vec<B::Vertex>, Vec<(usize, B::Vertex)>) {
        let mut all = Vec::new();
        let mut per_group: Vec<(usize, B::Vertex)> = Vec::new();
        for t in tuples {
            for (&g, v) in c.disperser.subsets[t.group].iter().zip(&t.parts) {
                if !all.contains(v) {
                    all.push(v.clone());
                }
                if !per_group.iter().any(|(h, _)| *h == g) {
                    per_group.push((g, v.clone()));
                }
            }
        }
        per_group.sort_by_key(|(g, _)| *g);
        (all, per_group)
    };
    let (la, lg) = unpack(left);
    let (ra, rg) = unpack(right);
    let is_biclique = la
        .iter()
        .all(|a| ra.iter().all(|b| c.base.cross_adjacent(a, b)));
    DecodedBiclique {
        left: lg,
        right: rg,
        is_biclique,
    }
}

/// Vertex of the densest-subgraph instance: a biclique vertex with its side
/// and group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DenseVertex<V> {
    pub side: Side,
    pub group: usize,
    pub vertex: V,
}

/// `2k` groups (left groups, then right groups). Cross-side edges come from
/// the biclique instance; same-side vertices of different groups are all
/// linked.
#[derive(Debug, Clone, Copy)]
pub struct DensestGraph<'a, B: BipartiteGroupedGraph> {
    base: &'a B,
}

impl<'a, B: BipartiteGroupedGraph> DensestGraph<'a, B> {
    pub fn new(base: &'a B) -> Self {
        DensestGraph { base }
    }

    fn locate(&self, g: usize) -> (Side, usize) {
        let k = self.base.groups(Side::Left);
        if g < k {
            (Side::Left, g)
        } else {
            (Side::Right, g - k)
        }
    }
}

impl<B: BipartiteGroupedGraph> GroupedGraph for DensestGraph<'_, B> {
    type Vertex = DenseVertex<B::Vertex>;

    fn group_count(&self) -> usize {
        self.base.groups(Side::Left) + self.base.groups(Side::Right)
    }

    fn group_size(&self, g: usize) -> u128 {
        let (side, i) = self.locate(g);
        self.base.group_size(side, i)
    }

    fn vertices(&self, g: usize) -> Box<dyn Iterator<Item = Self::Vertex> + '_> {
        let (side, group) = self.locate(g);
        Box::new(
            self.base
                .vertices(side, group)
                .map(move |vertex| DenseVertex {
                    side,
                    group,
                    vertex,
                }),
        )
    }

    fn group_of(&self, v: &Self::Vertex) -> usize {
        match v.side {
            Side::Left => v.group,
            Side::Right => self.base.groups(Side::Left) + v.group,
        }
    }

    fn adjacent(&self, u: &Self::Vertex, w: &Self::Vertex) -> bool {
        match (u.side, w.side) {
            (Side::Left, Side::Right) => self.base.cross_adjacent(&u.vertex, &w.vertex),
            (Side::Right, Side::Left) => self.base.cross_adjacent(&w.vertex, &u.vertex),
            _ => u.group != w.group,
        }
    }
}

/// `C(2k, 2)`: edges induced by a full biclique together with the
/// same-side links.
pub fn densest_yes_count(k: u64) -> u64 {
    k * (2 * k).saturating_sub(1)
}

/// `eps' k^2 + 2 C(k, 2)`.
pub fn densest_no_bound(k: u64, eps_prime: f64) -> f64 {
    eps_prime * (k * k) as f64 + (k * k.saturating_sub(1)) as f64
}

/// `(a-1)^(1/a) n^(2-1/a) / 2 + (a-1) n / 2`: the most edges a graph on `n`
/// vertices can have without containing `K_{a,a}`.
pub fn kst_bound<T: Real>(n: u64, a: u64) -> Result<T> {
    if a < 2 {
        return Err(Error::precondition("a must be at least 2"));
    }
    let (n, a) = (n as f64, a as f64);
    let value = 0.5 * (a - 1.0).powf(1.0 / a) * n.powf(2.0 - 1.0 / a) + 0.5 * (a - 1.0) * n;
    Ok(T::of(value))
}

/// Exact test of `edges <= n^(3/2)/2 + n/2`, the `a = 2` case, via
/// `(2 edges - n)^2 <= n^3`.
pub fn kst_holds_a2(n: u64, edges: u64) -> bool {
    let lhs = 2 * edges as i128 - n as i128;
    lhs <= 0 || lhs * lhs <= (n as i128).pow(3)
}

/// Largest edge count of a graph on `n <= 10` vertices without a 4-cycle
/// (`K_{2,2}`), by exhaustive branch and bound over edge subsets.
pub fn max_c4_free_edges(n: usize) -> Result<u64> {
    if n > 10 {
        return Err(Error::precondition("exhaustive search supports n <= 10"));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let mut adj = vec![0u32; n];
    let mut best = 0u64;
    fn creates_c4(adj: &[u32], u: usize, v: usize) -> bool {
        // After adding uv, u and each neighbor y of v share v; v and each
        // neighbor y of u share u.
        let check = |a: usize, shared: usize, others: u32| {
            let mut rest = others & !(1 << a);
            while rest != 0 {
                let y = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if (adj[a] & adj[y] & !(1 << shared)).count_ones() >= 1 {
                    return true;
                }
            }
            false
        };
        check(u, v, adj[v]) || check(v, u, adj[u])
    }
    fn rec(pairs: &[(usize, usize)], i: usize, adj: &mut [u32], edges: u64, best: &mut u64) {
        *best = (*best).max(edges);
        if i == pairs.len() || edges + (pairs.len() - i) as u64 <= *best {
            return;
        }
        let (u, v) = pairs[i];
        if !creates_c4(adj, u, v) {
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
            rec(pairs, i + 1, adj, edges + 1, best);
            adj[u] &= !(1 << v);
            adj[v] &= !(1 << u);
        }
        rec(pairs, i + 1, adj, edges, best);
    }
    rec(&pairs, 0, &mut adj, 0, &mut best);
    Ok(best)
}

/// Edges of a random grouped graph with the given group sizes: the first
/// vertex of every group in `planted` forms a clique, and every other
/// cross-group pair is an edge with probability `density`.
pub fn planted_edges<R: Rng>(
    rng: &mut R,
    sizes: &[usize],
    planted: &[usize],
    density: f64,
) -> Vec<(u32, u32)> {
    let mut offsets = vec![0u32];
    for &s in sizes {
        offsets.push(offsets.last().copied().unwrap_or(0) + s as u32);
    }
    let group_of = |v: u32| offsets.partition_point(|&o| o <= v) - 1;
    let chosen: Vec<u32> = planted.iter().map(|&g| offsets[g]).collect();
    let n = *offsets.last().unwrap_or(&0);
    let mut edges = Vec::new();
    for u in 0..n {
        for w in u + 1..n {
            if group_of(u) == group_of(w) {
                continue;
            }
            if (chosen.contains(&u) && chosen.contains(&w)) || rng.gen_bool(density) {
                edges.push((u, w));
            }
        }
    }
    edges
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grouped::{MaterializedGraph, SidedView};
    use crate::oracles::{
        max_biclique_materialized, max_clique_materialized, max_grouped_biclique,
    };

    #[test]
    fn ell_formula() {
        assert_eq!(disperser_ell(30, 10, 0.5), 18);
        assert_eq!(disperser_ell(30, 4, 0.5), 45);
        assert!(make_disperser(30, 8, 4, 0.5, 0).is_err());
        let d = make_disperser_clamped(30, 8, 4, 0.5, 0).unwrap();
        assert!(d.clamped && d.ell == 30 && d.ell_formula == 45);
    }

    #[test]
    fn disperser_preconditions() {
        assert!(make_disperser(10, 100, 5, 0.5, 0).is_err());
        assert!(make_disperser(30, 8, 4, 1.5, 0).is_err());
        let d = make_disperser(30, 4, 10, 0.5, 0);
        assert!(d.is_err());
    }

    #[test]
    fn equal_subsets_violate() {
        let mut d = make_disperser(40, 5, 4, 0.9, 1).unwrap();
        let s = d.subsets[0][..10].to_vec();
        d.ell = 10;
        d.subsets = vec![s; 5];
        d.eps = 0.2;
        let rep = d.verify(DisperserMode::Exact { budget: 100 }).unwrap();
        assert_eq!(rep.checked, 5);
        assert_eq!(rep.violations, 5);
        assert_eq!(rep.min_union, 10);
        assert_eq!(d.verified, Verification::Unverified);
    }

    #[test]
    fn single_union_when_r_equals_k() {
        let mut d = make_disperser(20, 4, 4, 0.9, 4).unwrap();
        let rep = d.verify(DisperserMode::Exact { budget: 100 }).unwrap();
        assert_eq!(rep.checked, 1);
    }

    #[test]
    fn disperser_text_round_trip() {
        let mut d = make_disperser(30, 10, 10, 0.5, 3).unwrap();
        d.verify(DisperserMode::Exact { budget: 1000 }).unwrap();
        let back = Disperser::from_text(&d.to_text()).unwrap();
        assert_eq!(back.subsets, d.subsets);
        assert_eq!(back.verified, Verification::Unverified);
    }

    #[test]
    fn kst_examples() {
        assert!((kst_bound::<f64>(4, 2).unwrap() - 6.0).abs() < 1e-12);
        let v: f64 = kst_bound(9, 3).unwrap();
        let direct = 0.5 * 2f64.cbrt() * 9f64.powf(5.0 / 3.0) + 9.0;
        assert!((v - direct).abs() < 1e-9);
        assert!(kst_bound::<f64>(4, 1).is_err());
        assert!(kst_holds_a2(4, 6) && !kst_holds_a2(4, 7));
    }

    #[test]
    fn c4_free_extremal_numbers() {
        let known = [0, 0, 1, 3, 4, 6, 7, 9, 11];
        for (n, &e) in known.iter().enumerate() {
            assert_eq!(max_c4_free_edges(n).unwrap(), e, "n = {n}");
        }
    }

    #[test]
    fn clique_biclique_single_group() {
        let g = MaterializedGraph::from_edges(&[3], &[]).unwrap();
        let b = CliqueBiclique::new(&g);
        let w = max_grouped_biclique(&b, 1000, 1000).unwrap();
        assert_eq!(w.cover(), (1, 1));
        assert_eq!(w.left, w.right);
    }

    #[test]
    fn identity_compression_is_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let edges = planted_edges(&mut rng, &[2, 2, 2], &[0, 1, 2], 0.4);
        let g = MaterializedGraph::from_edges(&[2, 2, 2], &edges).unwrap();
        let b = CliqueBiclique::new(&g);
        let mut d = make_disperser_clamped(3, 3, 1, 0.99, 0).unwrap();
        d.ell = 1;
        d.subsets = vec![vec![2], vec![0], vec![1]];
        d.verify(DisperserMode::Exact { budget: 10 }).unwrap();
        assert_eq!(d.verified, Verification::Exact);
        let c = CompressedBiclique::new(&b, &d).unwrap();
        let direct = max_grouped_biclique(&b, 1000, 100000).unwrap();
        let packed = max_grouped_biclique(&c, 1000, 100000).unwrap();
        assert_eq!(direct.cover(), packed.cover());
        assert_eq!(max_clique_materialized(&g, 10000).size(), 3);
    }

    #[test]
    fn densest_counts() {
        let g = MaterializedGraph::from_edges(&[1, 1, 1], &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let b = CliqueBiclique::new(&g);
        let dense = DensestGraph::new(&b);
        let w = crate::oracles::densest_grouped_subgraph(&dense, 1000, 10000).unwrap();
        assert_eq!(w.edges as u64, densest_yes_count(3));
        let m = MaterializedGraph::empty(&[1, 1])
            .unwrap()
            .with_sides(vec![Side::Left, Side::Right])
            .unwrap();
        let view = SidedView::new(&m).unwrap();
        let one = DensestGraph::new(&view);
        let w = crate::oracles::densest_grouped_subgraph(&one, 100, 100).unwrap();
        assert_eq!(w.edges, 0);
        assert_eq!(max_biclique_materialized(&m, 100).cover(), (0, 0));
    }
}
