//! graph6 and plain edge-list encodings.
//!
//! Only the one-byte graph6 size header is supported, so graphs with 63 or
//! more vertices are rejected rather than misparsed.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;

const BIAS: u8 = 63;
const MAX_SHORT_ORDER: usize = 62;

pub fn parse_graph6(line: &str) -> Result<Graph> {
    let bytes = line.trim_end_matches(['\n', '\r']).as_bytes();
    if let Some(&c) = bytes.iter().find(|&&c| !(63..=126).contains(&c)) {
        return Err(Error::Parse(format!("graph6 byte {c:#04x} outside 63..=126")));
    }
    let (&head, payload) = bytes
        .split_first()
        .ok_or_else(|| Error::Parse("empty graph6 line".into()))?;
    if head == 126 {
        return Err(Error::Parse(
            "graph6 long-form size header (n >= 63) is not supported".into(),
        ));
    }
    let n = (head - BIAS) as usize;
    let nbits = n * n.saturating_sub(1) / 2;
    let need = nbits.div_ceil(6);
    if payload.len() < need {
        return Err(Error::Parse(format!(
            "truncated graph6 payload: expected {need} bytes for n={n}, found {}",
            payload.len()
        )));
    }
    if payload.len() > need {
        return Err(Error::Parse(format!(
            "trailing graph6 payload: expected {need} bytes for n={n}, found {}",
            payload.len()
        )));
    }
    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let byte = payload[k / 6] - BIAS;
            if byte & (1 << (5 - k % 6)) != 0 {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    Graph::from_edges(n, &edges)
}

pub fn write_graph6(g: &Graph) -> Result<String> {
    let n = g.order();
    if n > MAX_SHORT_ORDER {
        return Err(Error::Size(format!(
            "graph6 long-form header (n = {n} >= 63) is not supported"
        )));
    }
    let nbits = n * n.saturating_sub(1) / 2;
    let mut groups = vec![0u8; nbits.div_ceil(6)];
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if g.has_edge(i, j) {
                groups[k / 6] |= 1 << (5 - k % 6);
            }
            k += 1;
        }
    }
    let mut out = String::with_capacity(groups.len() + 1);
    out.push((n as u8 + BIAS) as char);
    out.extend(groups.into_iter().map(|b| (b + BIAS) as char));
    Ok(out)
}

/// Edge-list text: a header `n m`, then `m` lines `u v` with 0-based indices.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty edge list".into()))?;
    let (n, m) = parse_pair(header)?;
    let mut edges = Vec::with_capacity(m);
    for line in lines.by_ref().take(m) {
        edges.push(parse_pair(line)?);
    }
    if edges.len() != m {
        return Err(Error::Parse(format!(
            "edge list header promises {m} edges, found {}",
            edges.len()
        )));
    }
    if lines.next().is_some() {
        return Err(Error::Parse("extra lines after edge list".into()));
    }
    Graph::from_edges(n, &edges)
}

fn parse_pair(line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace().map(|t| {
        t.parse::<usize>()
            .map_err(|e| Error::Parse(format!("bad integer {t:?}: {e}")))
    });
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Ok((a?, b?)),
        _ => Err(Error::Parse(format!("expected two integers, got {line:?}"))),
    }
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.order(), g.size());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

fn looks_like_edge_list(text: &str) -> bool {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .is_some_and(|l| l.split_whitespace().count() == 2)
}

/// Parses text holding either one edge list or any number of graph6 lines.
pub fn parse_graphs(text: &str) -> Result<Vec<Graph>> {
    if looks_like_edge_list(text) {
        return Ok(vec![parse_edge_list(text)?]);
    }
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| parse_graph6(l.strip_prefix(">>graph6<<").unwrap_or(l)))
        .collect()
}

pub fn read_graphs(path: impl AsRef<Path>) -> Result<Vec<Graph>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_graphs(&text)
}

/// Reads a file that must contain exactly one graph.
pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let mut gs = read_graphs(path)?;
    match gs.len() {
        1 => Ok(gs.pop().unwrap()),
        k => Err(Error::Parse(format!(
            "{}: expected exactly one graph, found {k}",
            path.display()
        ))),
    }
}
