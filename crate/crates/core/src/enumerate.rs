//! Small-graph generation: orderly enumeration up to isomorphism and seeded
//! Erdős–Rényi samples.
//!
//! Random graphs use ChaCha8 seeded through `SeedableRng::seed_from_u64`;
//! pairs `(i, j)` with `i < j` are visited in lexicographic order and each
//! draws one `f64` in `[0, 1)`, keeping the edge when the draw is below `p`.
//! The stream is platform independent, so a seed names the same graph
//! everywhere.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest order generated internally; beyond this, read a graph6 file.
pub const MAX_ENUM_ORDER: usize = 8;

const MAX_CANON_ORDER: usize = 16;

/// Canonical code of `g`: the lexicographically least graph6 bit string
/// (upper triangle, column by column) over all relabellings that respect an
/// isomorphism-invariant colour refinement. Equal codes mean isomorphic
/// graphs. Supports up to 16 vertices.
pub fn canonical_code(g: &Graph) -> Result<u128> {
    let n = g.order();
    if n > MAX_CANON_ORDER {
        return Err(Error::Size(format!(
            "canonical form supports at most {MAX_CANON_ORDER} vertices, got {n}"
        )));
    }
    let colors = refine(g);
    // positions grouped by colour, colours ascending
    let mut slots: Vec<usize> = colors.clone();
    slots.sort_unstable();
    let total = n * n.saturating_sub(1) / 2;
    let mut st = Canon {
        g,
        n,
        total,
        colors,
        slots,
        placed: Vec::with_capacity(n),
        used: vec![false; n],
        best: None,
    };
    st.search(0);
    Ok(st.best.unwrap_or(0))
}

/// Rebuilds the graph whose graph6 bit string is `code`.
pub fn graph_from_code(n: usize, code: u128) -> Result<Graph> {
    let total = n * n.saturating_sub(1) / 2;
    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if code >> (total - 1 - k) & 1 == 1 {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    Graph::from_edges(n, &edges)
}

fn refine(g: &Graph) -> Vec<usize> {
    let n = g.order();
    let mut colors: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut classes = count_classes(&colors);
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = g.neighbors(v).iter().map(|&u| colors[u]).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut uniq = sigs.clone();
        uniq.sort();
        uniq.dedup();
        let next: Vec<usize> = sigs
            .iter()
            .map(|s| uniq.binary_search(s).expect("signature present"))
            .collect();
        let c = uniq.len();
        colors = next;
        if c == classes {
            return colors;
        }
        classes = c;
    }
}

fn count_classes(colors: &[usize]) -> usize {
    colors.iter().collect::<HashSet<_>>().len()
}

struct Canon<'g> {
    g: &'g Graph,
    n: usize,
    total: usize,
    colors: Vec<usize>,
    slots: Vec<usize>,
    placed: Vec<usize>,
    used: Vec<bool>,
    best: Option<u128>,
}

impl Canon<'_> {
    fn search(&mut self, code: u128) {
        let j = self.placed.len();
        if j == self.n {
            if self.best.is_none_or(|b| code < b) {
                self.best = Some(code);
            }
            return;
        }
        for v in 0..self.n {
            if self.used[v] || self.colors[v] != self.slots[j] {
                continue;
            }
            // bits (i, j) for i < j occupy indices j(j-1)/2 .. j(j+1)/2
            let start = j * j.saturating_sub(1) / 2;
            let mut c = code;
            for (i, &u) in self.placed.iter().enumerate() {
                if self.g.has_edge(u, v) {
                    c |= 1u128 << (self.total - 1 - (start + i));
                }
            }
            let done = start + j;
            if let Some(b) = self.best {
                let shift = self.total - done;
                let (cp, bp) = if shift >= 128 { (0, 0) } else { (c >> shift, b >> shift) };
                if cp > bp {
                    continue;
                }
            }
            self.used[v] = true;
            self.placed.push(v);
            self.search(c);
            self.placed.pop();
            self.used[v] = false;
        }
    }
}

/// All graphs of order `n` up to isomorphism, optionally only connected
/// ones, in increasing canonical-code order.
pub fn enumerate_small_graphs(n: usize, connected: bool) -> Result<Vec<Graph>> {
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if n > MAX_ENUM_ORDER {
        return Err(Error::Size(format!(
            "internal enumeration stops at n = {MAX_ENUM_ORDER}; supply a graph6 file for n = {n}"
        )));
    }
    let mut level: Vec<u128> = vec![0];
    for m in 2..=n {
        level = extend_level(m - 1, &level)?;
    }
    let mut out = Vec::with_capacity(level.len());
    for code in level {
        let g = graph_from_code(n, code)?;
        if !connected || g.is_connected() {
            out.push(g);
        }
    }
    Ok(out)
}

/// Graphs of every order `1..=n_max`, grouped by order.
pub fn enumerate_up_to(n_max: usize, connected: bool) -> Result<Vec<Vec<Graph>>> {
    (1..=n_max).map(|n| enumerate_small_graphs(n, connected)).collect()
}

fn extend_level(m: usize, reps: &[u128]) -> Result<Vec<u128>> {
    let mut seen = HashSet::new();
    for &code in reps {
        let base = graph_from_code(m, code)?;
        let base_edges: Vec<_> = base.edges().collect();
        for mask in 0u32..(1 << m) {
            let mut edges = base_edges.clone();
            edges.extend((0..m).filter(|&i| mask >> i & 1 == 1).map(|i| (i, m)));
            let g = Graph::from_edges(m + 1, &edges)?;
            seen.insert(canonical_code(&g)?);
        }
    }
    let mut next: Vec<u128> = seen.into_iter().collect();
    next.sort_unstable();
    Ok(next)
}

/// Erdős–Rényi `G(n, p)` sample, reproducible from `seed`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_graph_with(&mut rng, n, p)
}

pub(crate) fn random_graph_with(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("edge probability {p} outside [0, 1]")));
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// `count` random graphs with orders uniform in `n_min..=n_max` and edge
/// probability uniform in `[p_min, p_max]`, all drawn from one seeded stream.
pub fn random_graphs(
    count: usize,
    n_min: usize,
    n_max: usize,
    p_min: f64,
    p_max: f64,
    seed: u64,
) -> Result<Vec<Graph>> {
    if n_min == 0 || n_min > n_max {
        return Err(Error::Domain(format!("bad order range {n_min}..={n_max}")));
    }
    if !(0.0..=1.0).contains(&p_min) || !(p_min..=1.0).contains(&p_max) {
        return Err(Error::Domain(format!("bad probability range [{p_min}, {p_max}]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(n_min..=n_max);
            let p = p_min + (p_max - p_min) * rng.gen::<f64>();
            random_graph_with(&mut rng, n, p)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::write_graph6;

    #[test]
    fn connected_counts() {
        let counts: Vec<usize> = (1..=6)
            .map(|n| enumerate_small_graphs(n, true).unwrap().len())
            .collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 21, 112]);
    }

    #[test]
    fn all_graph_counts() {
        let counts: Vec<usize> = (1..=6)
            .map(|n| enumerate_small_graphs(n, false).unwrap().len())
            .collect();
        assert_eq!(counts, vec![1, 2, 4, 11, 34, 156]);
    }

    #[test]
    fn order_three_is_path_and_triangle() {
        let gs = enumerate_small_graphs(3, true).unwrap();
        let mut sizes: Vec<usize> = gs.iter().map(Graph::size).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 3]);
    }

    #[test]
    fn enumeration_limit() {
        assert!(matches!(enumerate_small_graphs(9, true), Err(Error::Size(_))));
        assert!(matches!(enumerate_small_graphs(0, true), Err(Error::EmptyGraph)));
    }

    #[test]
    fn canonical_code_is_relabelling_invariant() {
        let g = Graph::petersen();
        let perm = [3, 7, 1, 9, 0, 2, 8, 5, 4, 6];
        let edges: Vec<_> = g.edges().map(|(u, v)| (perm[u], perm[v])).collect();
        let h = Graph::from_edges(10, &edges).unwrap();
        assert_eq!(canonical_code(&g).unwrap(), canonical_code(&h).unwrap());
        assert_ne!(
            canonical_code(&Graph::path(4).unwrap()).unwrap(),
            canonical_code(&Graph::star(3).unwrap()).unwrap()
        );
    }

    #[test]
    fn random_extremes_and_determinism() {
        assert_eq!(random_graph(6, 0.0, 1).unwrap().size(), 0);
        assert_eq!(random_graph(6, 1.0, 1).unwrap(), Graph::complete(6).unwrap());
        let a = write_graph6(&random_graph(9, 0.4, 42).unwrap()).unwrap();
        let b = write_graph6(&random_graph(9, 0.4, 42).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(random_graph(3, 1.5, 0).is_err());
    }

    #[test]
    fn random_batches_are_reproducible() {
        let a = random_graphs(20, 1, 12, 0.1, 0.9, 7).unwrap();
        let b = random_graphs(20, 1, 12, 0.1, 0.9, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|g| (1..=12).contains(&g.order())));
    }
}
