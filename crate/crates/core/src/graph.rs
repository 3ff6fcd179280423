//! Simple undirected graphs stored as adjacency row bitmasks.

use std::fmt;

use crate::error::{Error, Result};

/// Default vertex cap for Cartesian products.
pub const DEFAULT_PRODUCT_CAP: usize = 4096;

/// A subset of `0..n` for the graph it was created against.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    n: usize,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for v in 0..n {
            s.insert(v);
        }
        s
    }

    /// Builds a set from members; every member must be `< n`.
    pub fn from_members(n: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::empty(n);
        for v in members {
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            s.insert(v);
        }
        Ok(s)
    }

    /// Size of the universe this set lives in.
    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, v: usize) {
        debug_assert!(v < self.n);
        self.words[v / 64] |= 1 << (v % 64);
    }

    pub fn remove(&mut self, v: usize) {
        debug_assert!(v < self.n);
        self.words[v / 64] &= !(1 << (v % 64));
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.n && self.words[v / 64] & (1 << (v % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + b)
                }
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn intersects(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// An immutable finite simple graph on vertices `0..n`.
#[derive(Clone)]
pub struct Graph {
    n: usize,
    adj: Vec<VertexSet>,
    nbrs: Vec<Vec<usize>>,
    name: Option<String>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.adj == other.adj
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .field("name", &self.name)
            .finish()
    }
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate edges collapse; loops and
    /// out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut adj = vec![VertexSet::empty(n); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::Loop(u));
            }
            adj[u].insert(v);
            adj[v].insert(u);
        }
        Ok(Self::from_rows(n, adj))
    }

    fn from_rows(n: usize, adj: Vec<VertexSet>) -> Self {
        let nbrs = adj.iter().map(|row| row.to_vec()).collect();
        Self {
            n,
            adj,
            nbrs,
            name: None,
        }
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::from_edges(n, &[])
    }

    pub fn complete(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Self::from_edges(n, &edges)
    }

    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!("cycle needs at least 3 vertices, got {n}")));
        }
        let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn star(leaves: usize) -> Result<Self> {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Self::from_edges(leaves + 1, &edges)
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Self::from_edges(10, &edges).expect("petersen edges are valid")
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.nbrs.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.nbrs[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].contains(v)
    }

    /// Neighbors of `v` in increasing order. Panics if `v` is out of range.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.nbrs[v]
    }

    /// The adjacency row of `v` as a set.
    pub fn row(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    /// Edges `(u, v)` with `u < v`, ordered by `u` then `v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.nbrs[u]
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn open_nbhd(&self, v: usize) -> Result<VertexSet> {
        self.check_vertex(v)?;
        Ok(self.adj[v].clone())
    }

    pub fn closed_nbhd(&self, v: usize) -> Result<VertexSet> {
        let mut s = self.open_nbhd(v)?;
        s.insert(v);
        Ok(s)
    }

    /// Open `s`-private neighborhood of `v`: every `w` whose open neighborhood
    /// meets `s` in exactly `{v}`.
    pub fn private_nbhd(&self, v: usize, s: &VertexSet) -> Result<VertexSet> {
        self.check_vertex(v)?;
        if !s.contains(v) {
            return Err(Error::Domain(format!("vertex {v} is not a member of {s}")));
        }
        let mut out = VertexSet::empty(self.n);
        for w in 0..self.n {
            if self.adj[w].contains(v) && self.adj[w].intersection_len(s) == 1 {
                out.insert(w);
            }
        }
        Ok(out)
    }

    pub fn is_independent(&self, s: &VertexSet) -> bool {
        s.iter().all(|v| !self.adj[v].intersects(s))
    }

    /// True iff no vertex has three pairwise non-adjacent neighbors.
    pub fn is_claw_free(&self) -> bool {
        self.find_claw().is_none()
    }

    /// An induced claw as `(center, [leaves])`, if one exists.
    pub fn find_claw(&self) -> Option<(usize, [usize; 3])> {
        for c in 0..self.n {
            let nb = &self.nbrs[c];
            if nb.len() < 3 {
                continue;
            }
            for (ai, &a) in nb.iter().enumerate() {
                for (bi, &b) in nb.iter().enumerate().skip(ai + 1) {
                    if self.has_edge(a, b) {
                        continue;
                    }
                    for &x in &nb[bi + 1..] {
                        if !self.has_edge(a, x) && !self.has_edge(b, x) {
                            return Some((c, [a, b, x]));
                        }
                    }
                }
            }
        }
        None
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &w in &self.nbrs[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Subgraph induced by `vertices`, relabelled `0..len` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Result<Graph> {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            self.check_vertex(v)?;
            pos[v] = i;
        }
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &self.nbrs[v] {
                if pos[w] != usize::MAX && pos[w] > i {
                    edges.push((i, pos[w]));
                }
            }
        }
        Graph::from_edges(vertices.len(), &edges)
    }

    /// Disjoint union with `other` placed after the vertices of `self`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let off = self.n;
        let edges: Vec<_> = self
            .edges()
            .chain(other.edges().map(|(u, v)| (u + off, v + off)))
            .collect();
        Graph::from_edges(self.n + other.n, &edges).expect("union of valid graphs is valid")
    }
}

/// A vertex `(g, h)` of a Cartesian product `G □ H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProductVertex {
    pub g: usize,
    pub h: usize,
}

/// `G □ H` together with the coordinate maps. The flat index of `(g, h)` is
/// `g * n(H) + h`.
#[derive(Clone, Debug)]
pub struct Product {
    pub graph: Graph,
    n_g: usize,
    n_h: usize,
}

impl Product {
    pub fn flat(&self, pv: ProductVertex) -> usize {
        pv.g * self.n_h + pv.h
    }

    pub fn coords(&self, flat: usize) -> ProductVertex {
        ProductVertex {
            g: flat / self.n_h,
            h: flat % self.n_h,
        }
    }

    pub fn g_order(&self) -> usize {
        self.n_g
    }

    pub fn h_order(&self) -> usize {
        self.n_h
    }
}

/// Cartesian product with the default vertex cap.
pub fn cartesian_product(g: &Graph, h: &Graph) -> Result<Product> {
    cartesian_product_capped(g, h, DEFAULT_PRODUCT_CAP)
}

pub fn cartesian_product_capped(g: &Graph, h: &Graph, cap: usize) -> Result<Product> {
    let (ng, nh) = (g.order(), h.order());
    let n = ng
        .checked_mul(nh)
        .filter(|&n| n <= cap)
        .ok_or_else(|| Error::Size(format!("product of {ng} x {nh} vertices exceeds cap {cap}")))?;
    let mut edges = Vec::with_capacity(ng * h.size() + nh * g.size());
    for a in 0..ng {
        for (x, y) in h.edges() {
            edges.push((a * nh + x, a * nh + y));
        }
    }
    for (a, b) in g.edges() {
        for x in 0..nh {
            edges.push((a * nh + x, b * nh + x));
        }
    }
    let graph = Graph::from_edges(n, &edges)?;
    Ok(Product {
        graph,
        n_g: ng,
        n_h: nh,
    })
}
