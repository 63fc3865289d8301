//! Exact exhaustive solvers used as ground truth.
//!
//! All solvers materialize their input first, then search over bitsets.
//! When the node budget runs out they return the best selection found so
//! far with `exact == false`.

use crate::error::Result;
use crate::grouped::{
    materialize, materialize_bipartite, BipartiteGroupedGraph, Bits, GroupedGraph,
    MaterializedGraph, Side,
};

/// Default number of search nodes before an oracle gives up.
pub const DEFAULT_ORACLE_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueWitness<V> {
    /// Selected vertices, at most one per group, in group order.
    pub vertices: Vec<V>,
    pub groups: Vec<usize>,
    /// False when the search budget ran out: the size is then only a lower
    /// bound on the maximum.
    pub exact: bool,
    pub nodes: u64,
}

impl<V> CliqueWitness<V> {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }
}

/// Maximum clique of `g` (necessarily at most one vertex per group).
pub fn max_grouped_clique<G: GroupedGraph>(
    g: &G,
    materialize_budget: u128,
    budget: u64,
) -> Result<CliqueWitness<G::Vertex>> {
    let (m, verts) = materialize(g, materialize_budget)?;
    let w = max_clique_materialized(&m, budget);
    Ok(CliqueWitness {
        vertices: w
            .vertices
            .iter()
            .map(|&v| verts[v as usize].clone())
            .collect(),
        groups: w.groups,
        exact: w.exact,
        nodes: w.nodes,
    })
}

/// Maximum clique by branch and bound with a greedy-coloring bound.
///
/// Vertices are ordered by group then id. Every node colors its candidate
/// set greedily in that order and branches on candidates from the highest
/// color down, so the search and its witness are deterministic.
pub fn max_clique_materialized(g: &MaterializedGraph, budget: u64) -> CliqueWitness<u32> {
    let n = g.n();
    let mut search = CliqueSearch {
        g,
        best: Vec::new(),
        current: Vec::new(),
        nodes: 0,
        budget,
        exhausted: false,
    };
    search.expand(Bits::full(n));
    let mut best = search.best;
    best.sort_unstable();
    CliqueWitness {
        groups: best.iter().map(|&v| g.group_of_id(v)).collect(),
        vertices: best,
        exact: !search.exhausted,
        nodes: search.nodes,
    }
}

struct CliqueSearch<'a> {
    g: &'a MaterializedGraph,
    best: Vec<u32>,
    current: Vec<u32>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl CliqueSearch<'_> {
    fn expand(&mut self, mut cand: Bits) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        if cand.is_empty() {
            if self.current.len() > self.best.len() {
                self.best = self.current.clone();
            }
            return;
        }
        let (order, colors) = greedy_coloring(self.g, &cand);
        for idx in (0..order.len()).rev() {
            if self.current.len() + colors[idx] <= self.best.len() || self.exhausted {
                return;
            }
            let v = order[idx];
            self.current.push(v as u32);
            self.expand(cand.and(self.g.neighbors(v as u32)));
            self.current.pop();
            cand.remove(v);
        }
        if self.current.len() > self.best.len() {
            self.best = self.current.clone();
        }
    }
}

/// Greedy coloring of `cand` in id order. Returns the vertices sorted by
/// color and, for each position, the number of colors used up to it.
fn greedy_coloring(g: &MaterializedGraph, cand: &Bits) -> (Vec<usize>, Vec<usize>) {
    let mut uncolored = cand.clone();
    let mut order = Vec::with_capacity(cand.count());
    let mut colors = Vec::with_capacity(order.capacity());
    let mut color = 0;
    while !uncolored.is_empty() {
        color += 1;
        let mut avail = uncolored.clone();
        while let Some(v) = avail.first() {
            avail.remove(v);
            uncolored.remove(v);
            avail.and_not_assign(g.neighbors(v as u32));
            order.push(v);
            colors.push(color);
        }
    }
    (order, colors)
}

/// Whether a clique hitting every group exists, searching groups in order
/// with forward checking. Returns one vertex per group, or `None`; the
/// boolean is false when the budget ran out before a decision.
pub fn find_full_clique(g: &MaterializedGraph, budget: u64) -> (Option<Vec<u32>>, bool) {
    let mut found = None;
    let complete = for_each_full_clique(g, budget, |picks| {
        found = Some(picks.to_vec());
        false
    });
    let decided = complete || found.is_some();
    (found, decided)
}

/// Visits every clique that hits all groups, one vertex per group in group
/// order, until `visit` returns `false`. Returns `true` when the search ran
/// to completion within `budget` search nodes.
pub fn for_each_full_clique<F: FnMut(&[u32]) -> bool>(
    g: &MaterializedGraph,
    budget: u64,
    mut visit: F,
) -> bool {
    let mut picks = Vec::with_capacity(g.groups().len());
    let mut nodes = 0u64;
    let Some(cand) = arc_consistent(g) else {
        return true;
    };
    full_clique_rec(g, &cand, &mut picks, &mut nodes, budget, &mut visit) == Walk::Done
}

/// Drops, until nothing changes, every vertex lacking a neighbor in some
/// other group. `None` when a group empties out.
fn arc_consistent(g: &MaterializedGraph) -> Option<Bits> {
    let mut cand = Bits::full(g.n());
    let groups = g.groups();
    let mut changed = true;
    while changed {
        changed = false;
        for (gi, r) in groups.iter().enumerate() {
            for v in r.clone() {
                if !cand.contains(v as usize) {
                    continue;
                }
                let nb = cand.and(g.neighbors(v));
                let supported = groups
                    .iter()
                    .enumerate()
                    .all(|(hi, h)| hi == gi || nb.any_in(h.start as usize..h.end as usize));
                if !supported {
                    cand.remove(v as usize);
                    changed = true;
                }
            }
            if !cand.any_in(r.start as usize..r.end as usize) {
                return None;
            }
        }
    }
    Some(cand)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Walk {
    Done,
    Stopped,
    OutOfBudget,
}

fn full_clique_rec<F: FnMut(&[u32]) -> bool>(
    g: &MaterializedGraph,
    cand: &Bits,
    picks: &mut Vec<u32>,
    nodes: &mut u64,
    budget: u64,
    visit: &mut F,
) -> Walk {
    *nodes += 1;
    if *nodes > budget {
        return Walk::OutOfBudget;
    }
    let depth = picks.len();
    if depth == g.groups().len() {
        return if visit(picks) {
            Walk::Done
        } else {
            Walk::Stopped
        };
    }
    for v in g.groups()[depth].clone() {
        if !cand.contains(v as usize) {
            continue;
        }
        let next = cand.and(g.neighbors(v));
        if g.groups()[depth + 1..]
            .iter()
            .any(|r| !next.any_in(r.start as usize..r.end as usize))
        {
            continue;
        }
        picks.push(v);
        let walk = full_clique_rec(g, &next, picks, nodes, budget, visit);
        picks.pop();
        if walk != Walk::Done {
            return walk;
        }
    }
    Walk::Done
}

/// Maximum clique by enumerating every "one vertex or none per group"
/// selection. Used to cross-check [`max_clique_materialized`].
pub fn max_clique_naive(g: &MaterializedGraph) -> usize {
    fn rec(g: &MaterializedGraph, gi: usize, chosen: &mut Vec<u32>, best: &mut usize) {
        if gi == g.groups().len() {
            *best = (*best).max(chosen.len());
            return;
        }
        rec(g, gi + 1, chosen, best);
        for v in g.groups()[gi].clone() {
            chosen.push(v);
            if g.is_clique(chosen) {
                rec(g, gi + 1, chosen, best);
            }
            chosen.pop();
        }
    }
    let mut best = 0;
    rec(g, 0, &mut Vec::new(), &mut best);
    best
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BicliqueWitness<V> {
    /// At most one vertex per left group.
    pub left: Vec<V>,
    /// At most one vertex per right group, each adjacent to all of `left`.
    pub right: Vec<V>,
    pub exact: bool,
    pub nodes: u64,
}

impl<V> BicliqueWitness<V> {
    /// Groups covered per side, `(|left|, |right|)`.
    pub fn cover(&self) -> (usize, usize) {
        (self.left.len(), self.right.len())
    }
}

/// Largest balanced biclique `K_{s,s}` with at most one vertex per group on
/// each side. Without any edge the answer is `(0, 0)`.
pub fn max_grouped_biclique<B: BipartiteGroupedGraph>(
    b: &B,
    materialize_budget: u128,
    budget: u64,
) -> Result<BicliqueWitness<B::Vertex>> {
    let (m, verts) = materialize_bipartite(b, materialize_budget)?;
    let w = max_biclique_materialized(&m, budget);
    Ok(BicliqueWitness {
        left: w.left.iter().map(|&v| verts[v as usize].clone()).collect(),
        right: w.right.iter().map(|&v| verts[v as usize].clone()).collect(),
        exact: w.exact,
        nodes: w.nodes,
    })
}

/// [`max_grouped_biclique`] on a sided materialized graph.
pub fn max_biclique_materialized(g: &MaterializedGraph, budget: u64) -> BicliqueWitness<u32> {
    let left_groups: Vec<_> = g
        .side_groups(Side::Left)
        .into_iter()
        .map(|i| g.groups()[i].clone())
        .collect();
    let right_groups: Vec<_> = g
        .side_groups(Side::Right)
        .into_iter()
        .map(|i| g.groups()[i].clone())
        .collect();
    let mut right_all = Bits::new(g.n());
    for r in &right_groups {
        for v in r.clone() {
            right_all.insert(v as usize);
        }
    }
    let mut s = BicliqueSearch {
        g,
        left_groups: &left_groups,
        right_groups: &right_groups,
        chosen: Vec::new(),
        best: (0, Vec::new(), right_all.clone()),
        nodes: 0,
        budget,
        exhausted: false,
    };
    s.expand(0, &right_all);
    let (size, left, common) = s.best;
    let right: Vec<u32> = if size == 0 {
        Vec::new()
    } else {
        right_groups
            .iter()
            .filter_map(|r| r.clone().find(|&v| common.contains(v as usize)))
            .take(size)
            .collect()
    };
    BicliqueWitness {
        left: if size == 0 {
            Vec::new()
        } else {
            left[..size].to_vec()
        },
        right,
        exact: !s.exhausted,
        nodes: s.nodes,
    }
}

struct BicliqueSearch<'a> {
    g: &'a MaterializedGraph,
    left_groups: &'a [std::ops::Range<u32>],
    right_groups: &'a [std::ops::Range<u32>],
    chosen: Vec<u32>,
    /// (balanced size, left vertices, their common right neighbourhood)
    best: (usize, Vec<u32>, Bits),
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl BicliqueSearch<'_> {
    fn right_cover(&self, common: &Bits) -> usize {
        self.right_groups
            .iter()
            .filter(|r| common.any_in(r.start as usize..r.end as usize))
            .count()
    }

    fn expand(&mut self, gi: usize, common: &Bits) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let cover = self.right_cover(common);
        let value = self.chosen.len().min(cover);
        if value > self.best.0 {
            self.best = (value, self.chosen.clone(), common.clone());
        }
        let remaining = self.left_groups.len() - gi;
        if (self.chosen.len() + remaining).min(cover) <= self.best.0 || gi == self.left_groups.len()
        {
            return;
        }
        for v in self.left_groups[gi].clone() {
            let next = common.and(self.g.neighbors(v));
            if self.right_cover(&next) <= self.best.0 {
                continue;
            }
            self.chosen.push(v);
            self.expand(gi + 1, &next);
            self.chosen.pop();
            if self.exhausted {
                return;
            }
        }
        self.expand(gi + 1, common);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensestWitness<V> {
    /// One vertex per nonempty group, in group order.
    pub vertices: Vec<V>,
    pub edges: usize,
    pub exact: bool,
    pub nodes: u64,
}

/// Maximum number of edges induced by picking one vertex from every
/// nonempty group.
pub fn densest_grouped_subgraph<G: GroupedGraph>(
    g: &G,
    materialize_budget: u128,
    budget: u64,
) -> Result<DensestWitness<G::Vertex>> {
    let (m, verts) = materialize(g, materialize_budget)?;
    let w = densest_materialized(&m, budget);
    Ok(DensestWitness {
        vertices: w
            .vertices
            .iter()
            .map(|&v| verts[v as usize].clone())
            .collect(),
        edges: w.edges,
        exact: w.exact,
        nodes: w.nodes,
    })
}

pub fn densest_materialized(g: &MaterializedGraph, budget: u64) -> DensestWitness<u32> {
    let groups: Vec<_> = g
        .groups()
        .iter()
        .filter(|r| !r.is_empty())
        .cloned()
        .collect();
    let mut s = DensestSearch {
        g,
        groups: &groups,
        chosen: Vec::new(),
        chosen_bits: Bits::new(g.n()),
        best: (0, None),
        nodes: 0,
        budget,
        exhausted: false,
    };
    s.expand(0, 0);
    let vertices = s.best.1.unwrap_or_default();
    DensestWitness {
        edges: s.best.0,
        vertices,
        exact: !s.exhausted,
        nodes: s.nodes,
    }
}

struct DensestSearch<'a> {
    g: &'a MaterializedGraph,
    groups: &'a [std::ops::Range<u32>],
    chosen: Vec<u32>,
    chosen_bits: Bits,
    best: (usize, Option<Vec<u32>>),
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl DensestSearch<'_> {
    fn expand(&mut self, gi: usize, edges: usize) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        if gi == self.groups.len() {
            if self.best.1.is_none() || edges > self.best.0 {
                self.best = (edges, Some(self.chosen.clone()));
            }
            return;
        }
        // Each remaining group adds at most its best link count to the
        // chosen prefix, and remaining groups add at most C(r, 2) among
        // themselves.
        let rest = self.groups.len() - gi;
        let bound = edges
            + self.groups[gi..]
                .iter()
                .map(|r| {
                    r.clone()
                        .map(|v| self.g.neighbors(v).intersection_count(&self.chosen_bits))
                        .max()
                        .unwrap_or(0)
                })
                .sum::<usize>()
            + rest * (rest - 1) / 2;
        if self.best.1.is_some() && bound <= self.best.0 {
            return;
        }
        for v in self.groups[gi].clone() {
            let gain = self.g.neighbors(v).intersection_count(&self.chosen_bits);
            self.chosen.push(v);
            self.chosen_bits.insert(v as usize);
            self.expand(gi + 1, edges + gain);
            self.chosen_bits.remove(v as usize);
            self.chosen.pop();
            if self.exhausted {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_grouped(
        rng: &mut ChaCha8Rng,
        k: usize,
        max_size: usize,
        density: f64,
    ) -> MaterializedGraph {
        let sizes: Vec<usize> = (0..k).map(|_| rng.gen_range(1..=max_size)).collect();
        let mut g = MaterializedGraph::empty(&sizes).unwrap();
        let n = g.n() as u32;
        for u in 0..n {
            for w in u + 1..n {
                if g.group_of_id(u) != g.group_of_id(w) && rng.gen_bool(density) {
                    g.add_edge(u, w).unwrap();
                }
            }
        }
        g
    }

    #[test]
    fn planted_and_edgeless() {
        let sizes = [2, 2, 2];
        let edgeless = MaterializedGraph::empty(&sizes).unwrap();
        assert_eq!(max_clique_materialized(&edgeless, 1000).size(), 1);
        let planted =
            MaterializedGraph::from_edges(&sizes, &[(1, 3), (1, 5), (3, 5), (0, 2)]).unwrap();
        let w = max_clique_materialized(&planted, 1000);
        assert_eq!(w.vertices, vec![1, 3, 5]);
        assert!(w.exact);
        assert_eq!(
            find_full_clique(&planted, 1000),
            (Some(vec![1, 3, 5]), true)
        );
        assert_eq!(find_full_clique(&edgeless, 1000), (None, true));
    }

    #[test]
    fn branch_and_bound_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let k = rng.gen_range(1..=6);
            let density = rng.gen_range(0.2..0.95);
            let g = random_grouped(&mut rng, k, 4, density);
            let w = max_clique_materialized(&g, u64::MAX);
            assert!(g.is_clique(&w.vertices));
            assert_eq!(w.size(), max_clique_naive(&g));
            assert_eq!(find_full_clique(&g, u64::MAX).0.is_some(), w.size() == k);
        }
    }

    #[test]
    fn budget_flags_lower_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = random_grouped(&mut rng, 8, 4, 0.7);
        let w = max_clique_materialized(&g, 3);
        assert!(!w.exact);
        assert!(g.is_clique(&w.vertices));
    }

    #[test]
    fn biclique_conventions() {
        let empty = MaterializedGraph::empty(&[1, 1])
            .unwrap()
            .with_sides(vec![Side::Left, Side::Right])
            .unwrap();
        assert_eq!(max_biclique_materialized(&empty, 100).cover(), (0, 0));
        // K_{2,2} on groups L0 L1 R0 R1.
        let k22 = MaterializedGraph::from_edges(&[1, 1, 1, 1], &[(0, 2), (0, 3), (1, 2), (1, 3)])
            .unwrap()
            .with_sides(vec![Side::Left, Side::Left, Side::Right, Side::Right])
            .unwrap();
        let w = max_biclique_materialized(&k22, 100);
        assert_eq!(w.cover(), (2, 2));
        assert_eq!((w.left, w.right), (vec![0, 1], vec![2, 3]));
    }

    #[test]
    fn biclique_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let k = rng.gen_range(1..=4);
            let sizes: Vec<usize> = (0..2 * k).map(|_| rng.gen_range(1..=3)).collect();
            let sides: Vec<Side> = (0..2 * k)
                .map(|i| if i < k { Side::Left } else { Side::Right })
                .collect();
            let mut g = MaterializedGraph::empty(&sizes)
                .unwrap()
                .with_sides(sides)
                .unwrap();
            let left_n: u32 = sizes[..k].iter().sum::<usize>() as u32;
            for l in 0..left_n {
                for r in left_n..g.n() as u32 {
                    if rng.gen_bool(0.6) {
                        g.add_edge(l, r).unwrap();
                    }
                }
            }
            let w = max_biclique_materialized(&g, u64::MAX);
            for &l in &w.left {
                for &r in &w.right {
                    assert!(g.has_edge(l, r));
                }
            }
            assert_eq!(w.left.len(), w.right.len());
            assert_eq!(w.left.len(), naive_biclique(&g, k));
        }
    }

    fn naive_biclique(g: &MaterializedGraph, k: usize) -> usize {
        // Every choice of one-or-none per left group.
        let groups = g.groups();
        let mut best = 0;
        let mut choice = vec![0u32; k];
        loop {
            let left: Vec<u32> = (0..k)
                .filter(|&i| choice[i] > 0)
                .map(|i| groups[i].start + choice[i] - 1)
                .collect();
            let cover = groups[k..]
                .iter()
                .filter(|&r| r.clone().any(|v| left.iter().all(|&l| g.has_edge(l, v))))
                .count();
            best = best.max(left.len().min(cover));
            let mut i = 0;
            loop {
                if i == k {
                    return best;
                }
                choice[i] += 1;
                if choice[i] as usize <= groups[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn densest_examples() {
        let sizes = [1, 1, 1, 1];
        let complete: Vec<(u32, u32)> = (0..4)
            .flat_map(|u| (u + 1..4).map(move |w| (u, w)))
            .collect();
        let g = MaterializedGraph::from_edges(&sizes, &complete).unwrap();
        assert_eq!(densest_materialized(&g, 1000).edges, 6);
        let e = MaterializedGraph::empty(&sizes).unwrap();
        assert_eq!(densest_materialized(&e, 1000).edges, 0);
    }

    #[test]
    fn densest_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let k = rng.gen_range(1..=5);
            let g = random_grouped(&mut rng, k, 3, 0.5);
            let w = densest_materialized(&g, u64::MAX);
            let induced = |vs: &[u32]| {
                vs.iter()
                    .enumerate()
                    .map(|(i, &u)| vs[i + 1..].iter().filter(|&&w| g.has_edge(u, w)).count())
                    .sum::<usize>()
            };
            assert_eq!(induced(&w.vertices), w.edges);
            let mut best = 0;
            let mut choice = vec![0usize; k];
            'outer: loop {
                let vs: Vec<u32> = (0..k)
                    .map(|i| g.groups()[i].start + choice[i] as u32)
                    .collect();
                best = best.max(induced(&vs));
                for i in 0..k {
                    choice[i] += 1;
                    if choice[i] < g.groups()[i].len() {
                        continue 'outer;
                    }
                    choice[i] = 0;
                }
                break;
            }
            assert_eq!(w.edges, best);
        }
    }
}
