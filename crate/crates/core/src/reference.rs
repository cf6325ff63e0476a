//! Brute-force ground truth: Dijkstra with vertices removed.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{DsoError, Result};
use crate::graph::{dist_add, Dist, Vertex, WeightedDigraph, INF, NONE};
use crate::par::{map_range, Exec};
use crate::tree::{dijkstra, AllPairs, Direction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QueryAnswer {
    Finite(Dist),
    Unreachable,
    Invalid,
}

impl QueryAnswer {
    pub fn from_dist(d: Dist) -> Self {
        if d == INF {
            Self::Unreachable
        } else {
            Self::Finite(d)
        }
    }

    /// Distance with `INF` for unreachable; `None` for invalid queries.
    pub fn dist(self) -> Option<Dist> {
        match self {
            Self::Finite(d) => Some(d),
            Self::Unreachable => Some(INF),
            Self::Invalid => None,
        }
    }
}

impl std::fmt::Display for QueryAnswer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Finite(d) => write!(f, "{d}"),
            Self::Unreachable => f.write_str("inf"),
            Self::Invalid => f.write_str("err"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivergencePair {
    pub diverge: Vertex,
    pub converge: Vertex,
}

/// A distance with the first vertex after the source on a path realizing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub dist: Dist,
    pub next: Vertex,
}

impl Entry {
    pub const INF: Entry = Entry { dist: INF, next: NONE };

    pub fn new(dist: Dist, next: Vertex) -> Self {
        if dist == INF {
            Self::INF
        } else {
            Self { dist, next }
        }
    }
}

fn valid_ids(g: &WeightedDigraph, ids: &[Vertex]) -> bool {
    ids.iter().all(|&v| (v as usize) < g.n())
}

fn path_to(parent: &[Vertex], s: Vertex, t: Vertex) -> Vec<Vertex> {
    let mut out = vec![t];
    let mut v = t;
    while v != s {
        v = parent[v as usize];
        out.push(v);
    }
    out.reverse();
    out
}

/// Canonical shortest path avoiding `banned`, or `None` if `t` is cut off.
pub fn shortest_path_avoiding(g: &WeightedDigraph, s: Vertex, t: Vertex, banned: &[bool]) -> Option<(Dist, Vec<Vertex>)> {
    let sp = dijkstra(g, s, Direction::Forward, Some(banned));
    let d = sp.dist[t as usize];
    (d != INF).then(|| (d, path_to(&sp.parent, s, t)))
}

/// Canonical `st⋄f` with its path.
pub fn replacement_path_naive(g: &WeightedDigraph, s: Vertex, t: Vertex, f: Vertex) -> Result<Option<(Dist, Vec<Vertex>)>> {
    if !valid_ids(g, &[s, t, f]) || s == t || f == s || f == t {
        return Err(DsoError::Contract(format!("invalid triple ({s}, {t}, {f})")));
    }
    let mut banned = vec![false; g.n()];
    banned[f as usize] = true;
    Ok(shortest_path_avoiding(g, s, t, &banned))
}

/// `‖st⋄f‖` by Dijkstra on `G − f`.
pub fn replacement_distance_naive(g: &WeightedDigraph, s: Vertex, t: Vertex, f: Vertex) -> QueryAnswer {
    match replacement_path_naive(g, s, t, f) {
        Ok(Some((d, _))) => QueryAnswer::Finite(d),
        Ok(None) => QueryAnswer::Unreachable,
        Err(_) => QueryAnswer::Invalid,
    }
}

/// Hop offsets of `u` and `v` on the canonical `st`, if they form an
/// interval strictly inside it.
fn interval_offsets(g: &WeightedDigraph, s: Vertex, t: Vertex, u: Vertex, v: Vertex) -> Option<Vec<Vertex>> {
    if !valid_ids(g, &[s, t, u, v]) || s == t {
        return None;
    }
    let sp = dijkstra(g, s, Direction::Forward, None);
    if sp.dist[t as usize] == INF {
        return None;
    }
    let path = path_to(&sp.parent, s, t);
    let pu = path.iter().position(|&x| x == u)?;
    let pv = path.iter().position(|&x| x == v)?;
    (0 < pu && pu <= pv && pv + 1 < path.len()).then(|| path[pu..=pv].to_vec())
}

/// `‖st⋄[u,v]‖`: every vertex of the subpath `[u, v]` of `st` removed.
pub fn avoid_interval_naive(g: &WeightedDigraph, s: Vertex, t: Vertex, u: Vertex, v: Vertex) -> QueryAnswer {
    let Some(iv) = interval_offsets(g, s, t, u, v) else {
        return QueryAnswer::Invalid;
    };
    let mut banned = vec![false; g.n()];
    for x in iv {
        banned[x as usize] = true;
    }
    QueryAnswer::from_dist(shortest_path_avoiding(g, s, t, &banned).map_or(INF, |(d, _)| d))
}

/// `max_{f∈[u,v]} ‖st⋄f‖` with its maximizer; ties go to the earlier vertex.
pub fn bottleneck_naive(g: &WeightedDigraph, s: Vertex, t: Vertex, u: Vertex, v: Vertex) -> Result<(Vertex, Dist)> {
    let iv = interval_offsets(g, s, t, u, v).ok_or_else(|| DsoError::Contract(format!("[{u}, {v}] is not an interval inside {s}->{t}")))?;
    let mut best = (NONE, 0);
    for f in iv {
        let d = replacement_distance_naive(g, s, t, f).dist().unwrap_or(INF);
        if best.0 == NONE || d > best.1 {
            best = (f, d);
        }
    }
    Ok(best)
}

/// Where the canonical `st⋄f` leaves and rejoins `st`.
pub fn divergence_convergence(g: &WeightedDigraph, s: Vertex, t: Vertex, f: Vertex) -> Result<DivergencePair> {
    let sp = dijkstra(g, s, Direction::Forward, None);
    if sp.dist[t as usize] == INF {
        return Err(DsoError::Contract(format!("{t} unreachable from {s}")));
    }
    let st = path_to(&sp.parent, s, t);
    let pf =
        st.iter().position(|&x| x == f).filter(|&p| p > 0 && p + 1 < st.len()).ok_or_else(|| DsoError::Contract(format!("{f} is not interior to {s}->{t}")))?;
    let (_, rp) = replacement_path_naive(g, s, t, f)?.ok_or(DsoError::NoReplacementPath)?;
    let mut pos = vec![usize::MAX; g.n()];
    for (i, &x) in st.iter().enumerate() {
        pos[x as usize] = i;
    }
    let di = rp.iter().rposition(|&x| pos[x as usize] < pf).expect("replacement path starts at s");
    let ci = di + rp[di..].iter().position(|&x| pos[x as usize] != usize::MAX && pos[x as usize] > pf).expect("ends at t");
    Ok(DivergencePair { diverge: rp[di], converge: rp[ci] })
}

/// Every single-failure replacement distance: for each pair `(s, t)` and
/// each interior offset `p` of `st`, the value `‖st⋄(s⊕p)‖` with its first
/// hop. Built by re-running Dijkstra only inside the subtree of the failed
/// vertex, which is the only part of `T_s` that changes.
#[derive(Debug, Clone)]
pub struct ReplacementTable {
    n: usize,
    rows: Vec<Row>,
}

#[derive(Debug, Clone)]
struct Row {
    base: Vec<u32>,
    cells: Vec<Entry>,
}

impl ReplacementTable {
    pub fn build(g: &WeightedDigraph, ap: &AllPairs, exec: Exec) -> Self {
        let n = g.n();
        let rows = map_range(n, exec, |s| build_row(g, ap, s as Vertex));
        Self { n, rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `‖st⋄(s⊕p)‖` for `0 < p < |st|`.
    #[inline]
    pub fn at(&self, s: Vertex, t: Vertex, p: u32) -> Entry {
        let row = &self.rows[s as usize];
        row.cells[(row.base[t as usize] + p - 1) as usize]
    }

    /// Number of stored single-failure values.
    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.cells.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Ground-truth answer for any triple, following the dispatcher's
    /// conventions for degenerate queries.
    pub fn answer(&self, ap: &AllPairs, s: Vertex, t: Vertex, f: Vertex) -> QueryAnswer {
        let n = self.n as Vertex;
        if s >= n || t >= n || f >= n {
            return QueryAnswer::Invalid;
        }
        if s == t {
            return QueryAnswer::Finite(0);
        }
        if f == s || f == t {
            return QueryAnswer::Invalid;
        }
        if ap.on_canonical_path(s, t, f) {
            QueryAnswer::from_dist(self.at(s, t, ap.hops(s, f)).dist)
        } else {
            QueryAnswer::from_dist(ap.dist(s, t))
        }
    }
}

fn build_row(g: &WeightedDigraph, ap: &AllPairs, s: Vertex) -> Row {
    let n = g.n();
    let tr = ap.forward(s);
    let mut base = vec![u32::MAX; n];
    let mut total = 0u32;
    for (t, b) in base.iter_mut().enumerate() {
        if tr.reachable(t as Vertex) {
            *b = total;
            total += tr.depth[t].saturating_sub(1);
        }
    }
    let mut cells = vec![Entry::INF; total as usize];

    // Preorder numbering so that subtree(f) is a contiguous range.
    let mut kids = vec![Vec::new(); n];
    for &v in &tr.order {
        let p = tr.parent[v as usize];
        if p != NONE {
            kids[p as usize].push(v);
        }
    }
    let mut tin = vec![0u32; n];
    let mut tout = vec![0u32; n];
    let mut euler = Vec::with_capacity(tr.order.len());
    let mut stack = vec![(s, false)];
    while let Some((v, closing)) = stack.pop() {
        if closing {
            tout[v as usize] = euler.len() as u32;
            continue;
        }
        tin[v as usize] = euler.len() as u32;
        euler.push(v);
        stack.push((v, true));
        for &c in kids[v as usize].iter().rev() {
            stack.push((c, false));
        }
    }

    let mut dist = vec![INF; n];
    let mut hops = vec![u32::MAX; n];
    let mut par = vec![NONE; n];
    let mut next = vec![NONE; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &f in &tr.order {
        if f == s || kids[f as usize].is_empty() {
            continue;
        }
        let (lo, hi) = (tin[f as usize], tout[f as usize]);
        let inside = |v: Vertex| {
            let x = tin[v as usize];
            tr.reachable(v) && x > lo && x < hi
        };
        let sub = &euler[lo as usize + 1..hi as usize];
        for &v in sub {
            let vi = v as usize;
            dist[vi] = INF;
            hops[vi] = u32::MAX;
            par[vi] = NONE;
            done[vi] = false;
            for e in g.in_edges(v) {
                let p = e.tail;
                if p == f || !tr.reachable(p) || inside(p) {
                    continue;
                }
                let cand = (dist_add(tr.dist[p as usize], e.weight), tr.depth[p as usize] + 1);
                if cand < (dist[vi], hops[vi]) || (cand == (dist[vi], hops[vi]) && p < par[vi]) {
                    dist[vi] = cand.0;
                    hops[vi] = cand.1;
                    par[vi] = p;
                }
            }
            if dist[vi] != INF {
                heap.push(Reverse((dist[vi], hops[vi], v)));
            }
        }
        while let Some(Reverse((d, h, u))) = heap.pop() {
            let ui = u as usize;
            if done[ui] || (d, h) != (dist[ui], hops[ui]) {
                continue;
            }
            done[ui] = true;
            let p = par[ui];
            next[ui] = if p == s {
                u
            } else if inside(p) {
                next[p as usize]
            } else {
                ap.next(s, p)
            };
            for e in g.out_edges(u) {
                let v = e.head;
                if !inside(v) || done[v as usize] {
                    continue;
                }
                let vi = v as usize;
                let cand = (dist_add(d, e.weight), h + 1);
                if cand < (dist[vi], hops[vi]) {
                    dist[vi] = cand.0;
                    hops[vi] = cand.1;
                    par[vi] = u;
                    heap.push(Reverse((cand.0, cand.1, v)));
                } else if cand == (dist[vi], hops[vi]) && u < par[vi] {
                    par[vi] = u;
                }
            }
        }
        let p = tr.depth[f as usize];
        for &v in sub {
            let vi = v as usize;
            cells[(base[vi] + p - 1) as usize] = Entry::new(dist[vi], next[vi]);
        }
    }
    Row { base, cells }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::tests::{g4, g5};

    #[test]
    fn replacement_examples() {
        let (g4, g5) = (g4(), g5());
        assert_eq!(replacement_distance_naive(&g4, 0, 3, 2), QueryAnswer::Finite(6));
        assert_eq!(replacement_distance_naive(&g4, 0, 3, 1), QueryAnswer::Finite(6));
        assert_eq!(replacement_distance_naive(&g5, 0, 4, 2), QueryAnswer::Finite(10));
        assert_eq!(replacement_distance_naive(&g4, 0, 3, 0), QueryAnswer::Invalid);
        assert_eq!(replacement_path_naive(&g4, 0, 3, 2).unwrap().unwrap().1, vec![0, 1, 3]);
    }

    #[test]
    fn interval_examples() {
        let (g4, g5) = (g4(), g5());
        assert_eq!(avoid_interval_naive(&g4, 0, 3, 1, 2), QueryAnswer::Unreachable);
        assert_eq!(avoid_interval_naive(&g5, 0, 4, 1, 3), QueryAnswer::Finite(10));
        assert_eq!(avoid_interval_naive(&g5, 0, 4, 2, 2), QueryAnswer::Finite(10));
        assert_eq!(avoid_interval_naive(&g5, 0, 4, 3, 1), QueryAnswer::Invalid);
        assert_eq!(bottleneck_naive(&g4, 0, 3, 1, 2).unwrap(), (1, 6));
        assert_eq!(bottleneck_naive(&g5, 0, 4, 1, 3).unwrap().1, 10);
    }

    #[test]
    fn divergence_examples() {
        let (g4, g5) = (g4(), g5());
        assert_eq!(divergence_convergence(&g4, 0, 3, 2).unwrap(), DivergencePair { diverge: 1, converge: 3 });
        assert_eq!(divergence_convergence(&g4, 0, 3, 1).unwrap(), DivergencePair { diverge: 0, converge: 2 });
        assert_eq!(divergence_convergence(&g5, 0, 4, 2).unwrap(), DivergencePair { diverge: 0, converge: 4 });
        let cut = WeightedDigraph::from_edges(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        assert!(matches!(divergence_convergence(&cut, 0, 2, 1), Err(DsoError::NoReplacementPath)));
    }

    #[test]
    fn table_matches_full_dijkstra() {
        let g = g4();
        let ap = AllPairs::new(&g, Exec::Sequential);
        let tab = ReplacementTable::build(&g, &ap, Exec::Sequential);
        assert_eq!(tab.at(0, 3, 2), Entry { dist: 6, next: 1 });
        assert_eq!(tab.at(0, 3, 1), Entry { dist: 6, next: 2 });
        assert_eq!(tab.answer(&ap, 0, 1, 3), QueryAnswer::Finite(1));
    }
}
