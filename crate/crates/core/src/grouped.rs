//! Multipartite graphs whose groups are independent sets.
//!
//! Reductions expose their graphs through [`GroupedGraph`], an implicit
//! interface (group enumerators plus an adjacency oracle). Small graphs can
//! be turned into a [`MaterializedGraph`] with bitset adjacency, which is
//! what the exact oracles and the text format work on.

use std::fmt::Write as _;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::vectorsum::LineReader;

/// Default cap on the number of vertices materialized at once.
pub const DEFAULT_MATERIALIZE_BUDGET: u128 = 1_000_000;

/// Adjacency bit matrices above this many bits are refused.
const MAX_ADJACENCY_BITS: u128 = 1 << 33;

pub trait GroupedGraph {
    type Vertex: Clone + PartialEq + std::fmt::Debug;

    fn group_count(&self) -> usize;

    /// Number of vertices in group `g`, saturating at `u128::MAX`.
    fn group_size(&self, g: usize) -> u128;

    fn vertices(&self, g: usize) -> Box<dyn Iterator<Item = Self::Vertex> + '_>;

    fn group_of(&self, v: &Self::Vertex) -> usize;

    /// Symmetric; false for two vertices of the same group.
    fn adjacent(&self, u: &Self::Vertex, w: &Self::Vertex) -> bool;

    fn vertex_count(&self) -> u128 {
        (0..self.group_count()).fold(0u128, |acc, g| acc.saturating_add(self.group_size(g)))
    }
}

/// A bipartite graph with grouped sides; edges only cross sides.
pub trait BipartiteGroupedGraph {
    type Vertex: Clone + PartialEq + std::fmt::Debug;

    fn groups(&self, side: Side) -> usize;

    fn group_size(&self, side: Side, g: usize) -> u128;

    fn vertices(&self, side: Side, g: usize) -> Box<dyn Iterator<Item = Self::Vertex> + '_>;

    /// Whether left vertex `l` and right vertex `r` are adjacent.
    fn cross_adjacent(&self, l: &Self::Vertex, r: &Self::Vertex) -> bool;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn tag(self) -> &'static str {
        match self {
            Side::Left => "L",
            Side::Right => "R",
        }
    }
}

/// Fixed-size bitset over `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    words: Vec<u64>,
}

impl Bits {
    pub fn new(n: usize) -> Self {
        Bits {
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut b = Bits::new(n);
        for i in 0..n {
            b.insert(i);
        }
        b
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn and(&self, other: &Bits) -> Bits {
        Bits {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn and_assign(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn and_not_assign(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn intersection_count(&self, other: &Bits) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Whether any bit in `range` is set.
    pub fn any_in(&self, range: Range<usize>) -> bool {
        range.into_iter().any(|i| self.contains(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }
}

/// Explicit grouped graph on vertex ids `0..n`, numbered group by group.
///
/// When `sides` is present the graph is bipartite: every group carries a
/// side tag and edges join only groups on different sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaterializedGraph {
    groups: Vec<Range<u32>>,
    group_of: Vec<u32>,
    adj: Vec<Bits>,
    sides: Option<Vec<Side>>,
}

impl MaterializedGraph {
    /// Builds a graph from group sizes and an edge list. Edges inside a
    /// group, self-loops and duplicates are rejected.
    pub fn from_edges(sizes: &[usize], edges: &[(u32, u32)]) -> Result<Self> {
        let mut g = Self::empty(sizes)?;
        for &(u, w) in edges {
            g.add_edge(u, w)?;
        }
        Ok(g)
    }

    pub fn empty(sizes: &[usize]) -> Result<Self> {
        let n: usize = sizes.iter().sum();
        if (n as u128) * (n as u128) > MAX_ADJACENCY_BITS || n > u32::MAX as usize {
            return Err(Error::budget(
                "adjacency bits",
                (n as u128) * (n as u128),
                MAX_ADJACENCY_BITS,
            ));
        }
        let mut groups = Vec::with_capacity(sizes.len());
        let mut group_of = Vec::with_capacity(n);
        let mut start = 0u32;
        for (g, &s) in sizes.iter().enumerate() {
            groups.push(start..start + s as u32);
            group_of.extend(std::iter::repeat_n(g as u32, s));
            start += s as u32;
        }
        Ok(MaterializedGraph {
            groups,
            group_of,
            adj: vec![Bits::new(n); n],
            sides: None,
        })
    }

    /// Tags groups with sides, turning the graph into a biclique instance.
    pub fn with_sides(mut self, sides: Vec<Side>) -> Result<Self> {
        if sides.len() != self.groups.len() {
            return Err(Error::DimensionMismatch {
                expected: self.groups.len(),
                found: sides.len(),
            });
        }
        for u in 0..self.n() {
            for w in self.adj[u].iter() {
                if sides[self.group_of[u] as usize] == sides[self.group_of[w] as usize] {
                    return Err(Error::precondition("edge between groups on the same side"));
                }
            }
        }
        self.sides = Some(sides);
        Ok(self)
    }

    pub fn add_edge(&mut self, u: u32, w: u32) -> Result<()> {
        let n = self.n() as u32;
        if u >= n || w >= n {
            return Err(Error::precondition(format!("edge ({u}, {w}) out of range")));
        }
        if self.group_of[u as usize] == self.group_of[w as usize] {
            return Err(Error::precondition(format!(
                "edge ({u}, {w}) inside a group"
            )));
        }
        if let Some(sides) = &self.sides {
            if sides[self.group_of[u as usize] as usize]
                == sides[self.group_of[w as usize] as usize]
            {
                return Err(Error::precondition(format!(
                    "edge ({u}, {w}) inside a side"
                )));
            }
        }
        if self.adj[u as usize].contains(w as usize) {
            return Err(Error::precondition(format!("duplicate edge ({u}, {w})")));
        }
        self.adj[u as usize].insert(w as usize);
        self.adj[w as usize].insert(u as usize);
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.group_of.len()
    }

    pub fn groups(&self) -> &[Range<u32>] {
        &self.groups
    }

    pub fn sides(&self) -> Option<&[Side]> {
        self.sides.as_deref()
    }

    #[inline]
    pub fn group_of_id(&self, v: u32) -> usize {
        self.group_of[v as usize] as usize
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> &Bits {
        &self.adj[v as usize]
    }

    #[inline]
    pub fn has_edge(&self, u: u32, w: u32) -> bool {
        self.adj[u as usize].contains(w as usize)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Bits::count).sum::<usize>() / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.adj[u]
                .iter()
                .filter(move |&w| w > u)
                .map(move |w| (u as u32, w as u32))
        })
    }

    /// Whether `vs` are pairwise adjacent (hence in distinct groups).
    pub fn is_clique(&self, vs: &[u32]) -> bool {
        vs.iter()
            .enumerate()
            .all(|(i, &u)| vs[i + 1..].iter().all(|&w| self.has_edge(u, w)))
    }

    /// Ids of the left and right groups in order, if the graph has sides.
    pub fn side_groups(&self, side: Side) -> Vec<usize> {
        match &self.sides {
            Some(s) => (0..s.len()).filter(|&g| s[g] == side).collect(),
            None => Vec::new(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "groups {}", self.groups.len());
        for (g, range) in self.groups.iter().enumerate() {
            let tag = self.sides.as_ref().map_or("", |sd| sd[g].tag());
            let size = range.len();
            if tag.is_empty() {
                let _ = writeln!(s, "group {g} size {size}");
            } else {
                let _ = writeln!(s, "group {g} size {size} {tag}");
            }
            let ids: Vec<String> = range.clone().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{}", ids.join(" "));
        }
        let _ = writeln!(s, "edges {}", self.edge_count());
        for (u, w) in self.edges() {
            let _ = writeln!(s, "{u} {w}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = LineReader::new(text);
        let k = lines.keyed_number("groups")? as usize;
        let mut sizes = Vec::with_capacity(k);
        let mut sides = Vec::with_capacity(k);
        let mut next_id = 0u64;
        for g in 0..k {
            let (n, toks) = lines.keyed_tokens("group")?;
            let tag = match toks[..] {
                [id, "size", _] | [id, "size", _, _] if id.parse() == Ok(g) => toks.get(3).copied(),
                _ => {
                    return Err(Error::parse(
                        n,
                        format!("expected `group {g} size <n> [L|R]`"),
                    ))
                }
            };
            let size: usize = toks[2]
                .parse()
                .map_err(|_| Error::parse(n, "bad group size"))?;
            sides.push(match tag {
                None => None,
                Some("L") => Some(Side::Left),
                Some("R") => Some(Side::Right),
                Some(t) => return Err(Error::parse(n, format!("bad side tag `{t}`"))),
            });
            let (vn, vline) = lines.next_line()?;
            let ids: Vec<u64> = vline
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::parse(vn, format!("bad vertex id `{t}`")))
                })
                .collect::<Result<_>>()?;
            if ids.len() != size
                || ids
                    .iter()
                    .enumerate()
                    .any(|(i, &id)| id != next_id + i as u64)
            {
                return Err(Error::parse(
                    vn,
                    "vertex ids must continue the running numbering",
                ));
            }
            next_id += size as u64;
            sizes.push(size);
        }
        let mut g = Self::empty(&sizes)?;
        if sides.iter().all(Option::is_some) && k > 0 {
            g.sides = Some(sides.into_iter().flatten().collect());
        } else if sides.iter().any(Option::is_some) {
            return Err(Error::parse(
                lines.line_no(),
                "side tags must be on all groups or none",
            ));
        }
        let m = lines.keyed_number("edges")?;
        for _ in 0..m {
            let (n, line) = lines.next_line()?;
            let pair: Vec<u32> = line
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::parse(n, format!("bad vertex id `{t}`")))
                })
                .collect::<Result<_>>()?;
            let [u, w] = pair[..] else {
                return Err(Error::parse(n, "expected `u w`"));
            };
            g.add_edge(u, w)
                .map_err(|e| Error::parse(n, e.to_string()))?;
        }
        lines.expect_end()?;
        Ok(g)
    }
}

impl GroupedGraph for MaterializedGraph {
    type Vertex = u32;

    fn group_count(&self) -> usize {
        self.groups.len()
    }

    fn group_size(&self, g: usize) -> u128 {
        self.groups[g].len() as u128
    }

    fn vertices(&self, g: usize) -> Box<dyn Iterator<Item = u32> + '_> {
        Box::new(self.groups[g].clone())
    }

    fn group_of(&self, v: &u32) -> usize {
        self.group_of_id(*v)
    }

    fn adjacent(&self, u: &u32, w: &u32) -> bool {
        self.has_edge(*u, *w)
    }
}

/// A sided [`MaterializedGraph`] seen as a biclique instance. Left groups
/// are the `L`-tagged groups in order, and likewise for the right side.
#[derive(Debug, Clone)]
pub struct SidedView<'a> {
    graph: &'a MaterializedGraph,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl<'a> SidedView<'a> {
    pub fn new(graph: &'a MaterializedGraph) -> Result<Self> {
        if graph.sides().is_none() {
            return Err(Error::precondition("graph has no side tags"));
        }
        Ok(SidedView {
            graph,
            left: graph.side_groups(Side::Left),
            right: graph.side_groups(Side::Right),
        })
    }

    fn group(&self, side: Side, g: usize) -> usize {
        match side {
            Side::Left => self.left[g],
            Side::Right => self.right[g],
        }
    }
}

impl BipartiteGroupedGraph for SidedView<'_> {
    type Vertex = u32;

    fn groups(&self, side: Side) -> usize {
        match side {
            Side::Left => self.left.len(),
            Side::Right => self.right.len(),
        }
    }

    fn group_size(&self, side: Side, g: usize) -> u128 {
        self.graph.groups[self.group(side, g)].len() as u128
    }

    fn vertices(&self, side: Side, g: usize) -> Box<dyn Iterator<Item = u32> + '_> {
        Box::new(self.graph.groups[self.group(side, g)].clone())
    }

    fn cross_adjacent(&self, l: &u32, r: &u32) -> bool {
        self.graph.has_edge(*l, *r)
    }
}

/// Enumerates every vertex of `g` and queries every cross-group pair.
/// Returns the explicit graph and the vertex behind each id.
pub fn materialize<G: GroupedGraph>(
    g: &G,
    budget: u128,
) -> Result<(MaterializedGraph, Vec<G::Vertex>)> {
    let total = g.vertex_count();
    if total > budget {
        return Err(Error::budget("materialized vertices", total, budget));
    }
    let sizes: Vec<usize> = (0..g.group_count())
        .map(|i| g.group_size(i) as usize)
        .collect();
    let mut out = MaterializedGraph::empty(&sizes)?;
    let mut verts = Vec::with_capacity(total as usize);
    for i in 0..g.group_count() {
        let before = verts.len();
        verts.extend(g.vertices(i));
        if verts.len() - before != sizes[i] {
            return Err(Error::VerificationFailed(format!(
                "group {i} enumerated {} vertices, reported size {}",
                verts.len() - before,
                sizes[i]
            )));
        }
    }
    for u in 0..verts.len() {
        let gu = out.group_of[u];
        for w in u + 1..verts.len() {
            if out.group_of[w] != gu && g.adjacent(&verts[u], &verts[w]) {
                out.adj[u].insert(w);
                out.adj[w].insert(u);
            }
        }
    }
    Ok((out, verts))
}

/// Like [`materialize`] for bipartite graphs: left groups come first, and
/// only cross pairs are queried.
pub fn materialize_bipartite<B: BipartiteGroupedGraph>(
    b: &B,
    budget: u128,
) -> Result<(MaterializedGraph, Vec<B::Vertex>)> {
    let mut sizes = Vec::new();
    let mut sides = Vec::new();
    for side in [Side::Left, Side::Right] {
        for g in 0..b.groups(side) {
            sizes.push(b.group_size(side, g));
            sides.push(side);
        }
    }
    let total = sizes.iter().fold(0u128, |a, &s| a.saturating_add(s));
    if total > budget {
        return Err(Error::budget("materialized vertices", total, budget));
    }
    let sizes: Vec<usize> = sizes.into_iter().map(|s| s as usize).collect();
    let mut out = MaterializedGraph::empty(&sizes)?;
    let mut verts = Vec::with_capacity(total as usize);
    for side in [Side::Left, Side::Right] {
        for g in 0..b.groups(side) {
            verts.extend(b.vertices(side, g));
        }
    }
    if verts.len() != total as usize {
        return Err(Error::VerificationFailed(
            "group enumeration disagrees with sizes".into(),
        ));
    }
    let left_n: usize = sizes[..b.groups(Side::Left)].iter().sum();
    for l in 0..left_n {
        for r in left_n..verts.len() {
            if b.cross_adjacent(&verts[l], &verts[r]) {
                out.adj[l].insert(r);
                out.adj[r].insert(l);
            }
        }
    }
    out.sides = Some(sides);
    Ok((out, verts))
}

/// Formats a witness as `group vertex` lines.
pub fn witness_to_text(pairs: &[(usize, u32)]) -> String {
    pairs.iter().map(|(g, v)| format!("{g} {v}\n")).collect()
}

pub fn witness_from_text(text: &str) -> Result<Vec<(usize, u32)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let [g, v] = toks[..] else {
            return Err(Error::parse(i + 1, "expected `group vertex`"));
        };
        let g = g.parse().map_err(|_| Error::parse(i + 1, "bad group"))?;
        let v = v.parse().map_err(|_| Error::parse(i + 1, "bad vertex"))?;
        out.push((g, v));
    }
    Ok(out)
}
