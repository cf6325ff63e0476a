//! Weighted directed graphs and the DIMACS-style loader.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{DsoError, Result};

/// Vertex identifier (0-based internally).
pub type Vertex = u32;

/// Weighted distance. `INF` marks "unreachable".
pub type Dist = u64;

/// Sentinel for an unreachable vertex or an impossible path.
pub const INF: Dist = Dist::MAX;

/// Sentinel vertex id ("no vertex").
pub const NONE: Vertex = Vertex::MAX;

/// Largest admissible edge weight.
pub const MAX_WEIGHT: u64 = 1 << 32;

/// Saturating sum where `INF` absorbs.
#[inline]
pub fn dist_add(a: Dist, b: Dist) -> Dist {
    if a == INF || b == INF {
        INF
    } else {
        a.saturating_add(b).min(INF - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub tail: Vertex,
    pub head: Vertex,
    pub weight: u64,
}

/// Directed graph with non-negative integer weights, stored as forward and
/// reverse CSR adjacency over a deduplicated edge list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedDigraph {
    n: usize,
    edges: Vec<Edge>,
    out_start: Vec<u32>,
    out_edges: Vec<u32>,
    in_start: Vec<u32>,
    in_edges: Vec<u32>,
}

impl WeightedDigraph {
    /// Builds a graph from raw edges. Self-loops are dropped and parallel
    /// edges collapse to their minimum weight.
    pub fn from_edges(n: usize, raw: impl IntoIterator<Item = (Vertex, Vertex, u64)>) -> Result<Self> {
        let mut best: HashMap<(Vertex, Vertex), u64> = HashMap::new();
        for (u, v, w) in raw {
            if u as usize >= n || v as usize >= n {
                return Err(DsoError::Contract(format!("edge {u}->{v} out of range for n={n}")));
            }
            if w > MAX_WEIGHT {
                return Err(DsoError::Contract(format!("weight {w} exceeds 2^32")));
            }
            if u == v {
                continue;
            }
            best.entry((u, v)).and_modify(|x| *x = (*x).min(w)).or_insert(w);
        }
        let mut edges: Vec<Edge> = best.into_iter().map(|((tail, head), weight)| Edge { tail, head, weight }).collect();
        edges.sort_by_key(|e| (e.tail, e.head));
        Ok(Self::from_sorted(n, edges))
    }

    fn from_sorted(n: usize, edges: Vec<Edge>) -> Self {
        let mut out_start = vec![0u32; n + 1];
        let mut in_start = vec![0u32; n + 1];
        for e in &edges {
            out_start[e.tail as usize + 1] += 1;
            in_start[e.head as usize + 1] += 1;
        }
        for i in 0..n {
            out_start[i + 1] += out_start[i];
            in_start[i + 1] += in_start[i];
        }
        let mut out_edges = vec![0u32; edges.len()];
        let mut in_edges = vec![0u32; edges.len()];
        let mut out_fill = out_start.clone();
        let mut in_fill = in_start.clone();
        for (i, e) in edges.iter().enumerate() {
            out_edges[out_fill[e.tail as usize] as usize] = i as u32;
            out_fill[e.tail as usize] += 1;
            in_edges[in_fill[e.head as usize] as usize] = i as u32;
            in_fill[e.head as usize] += 1;
        }
        Self { n, edges, out_start, out_edges, in_start, in_edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Out-edges of `v`, sorted by head.
    pub fn out_edges(&self, v: Vertex) -> impl Iterator<Item = &Edge> + '_ {
        let (a, b) = (self.out_start[v as usize], self.out_start[v as usize + 1]);
        self.out_edges[a as usize..b as usize].iter().map(move |&i| &self.edges[i as usize])
    }

    /// In-edges of `v`.
    pub fn in_edges(&self, v: Vertex) -> impl Iterator<Item = &Edge> + '_ {
        let (a, b) = (self.in_start[v as usize], self.in_start[v as usize + 1]);
        self.in_edges[a as usize..b as usize].iter().map(move |&i| &self.edges[i as usize])
    }

    /// Weight of edge `u -> v`, if present.
    pub fn weight(&self, u: Vertex, v: Vertex) -> Option<u64> {
        let (a, b) = (self.out_start[u as usize] as usize, self.out_start[u as usize + 1] as usize);
        let slice = &self.out_edges[a..b];
        slice.binary_search_by_key(&v, |&i| self.edges[i as usize].head).ok().map(|k| self.edges[slice[k] as usize].weight)
    }

    /// The transpose graph.
    pub fn reversed(&self) -> Self {
        let mut edges: Vec<Edge> = self.edges.iter().map(|e| Edge { tail: e.head, head: e.tail, weight: e.weight }).collect();
        edges.sort_by_key(|e| (e.tail, e.head));
        Self::from_sorted(self.n, edges)
    }

    /// Serializes in the DIMACS-style format accepted by [`load_graph`].
    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p sp {} {}\n", self.n, self.m());
        for e in &self.edges {
            s.push_str(&format!("a {} {} {}\n", e.tail + 1, e.head + 1, e.weight));
        }
        s
    }
}

/// Parses a DIMACS shortest-path file: `c` comment lines, one
/// `p sp <n> <m>` header, then `a <u> <v> <w>` arcs with 1-based ids.
pub fn load_graph(text: &str) -> Result<WeightedDigraph> {
    let mut n: Option<usize> = None;
    let mut raw = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let parse_err = |msg: &str| DsoError::Parse { line: lineno, msg: msg.to_string() };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("c") => continue,
            Some("p") => {
                if n.is_some() {
                    return Err(parse_err("duplicate header"));
                }
                if tok.next() != Some("sp") {
                    return Err(parse_err("expected `p sp <n> <m>`"));
                }
                let nv: usize = tok.next().and_then(|x| x.parse().ok()).ok_or_else(|| parse_err("bad vertex count"))?;
                let _m: usize = tok.next().and_then(|x| x.parse().ok()).ok_or_else(|| parse_err("bad edge count"))?;
                if nv >= NONE as usize {
                    return Err(parse_err("vertex count too large"));
                }
                n = Some(nv);
            }
            Some("a") => {
                let nv = n.ok_or_else(|| parse_err("arc before header"))?;
                let mut field = |what: &str| -> Result<u64> {
                    tok.next().ok_or_else(|| parse_err(&format!("missing {what}")))?.parse::<u64>().map_err(|_| parse_err(&format!("bad {what}")))
                };
                let u = field("tail")?;
                let v = field("head")?;
                let w = field("weight")?;
                if u == 0 || v == 0 || u as usize > nv || v as usize > nv {
                    return Err(parse_err("vertex id out of range"));
                }
                if w > MAX_WEIGHT {
                    return Err(parse_err("weight overflow"));
                }
                raw.push(((u - 1) as Vertex, (v - 1) as Vertex, w));
            }
            Some(other) => return Err(parse_err(&format!("unknown line type `{other}`"))),
            None => continue,
        }
    }
    let n = n.ok_or(DsoError::Parse { line: 0, msg: "missing header".into() })?;
    WeightedDigraph::from_edges(n, raw)
}
