//! Shortest-path trees with deterministic tie-breaking and the all-pairs
//! canonical path system built from them.
//!
//! Ties are broken by the key `(distance, hops, parent id)`. The resulting
//! path to `v` is the reverse-lexicographically smallest among all
//! minimum-hop shortest paths, which makes the whole system consistent: every
//! subpath of a canonical path is itself canonical. Reverse trees used by the
//! oracles are therefore derived from the forward trees instead of running
//! Dijkstra on the transpose (which would pick a different, lexicographic
//! tie-break and disagree on tied pairs).

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::ancestor::LevelAncestor;
use crate::error::{DsoError, Result};
use crate::graph::{dist_add, Dist, Vertex, WeightedDigraph, INF, NONE};
use crate::par::{map_range, Exec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Reverse,
}

/// Raw single-source output: labels plus the settle order (parents first).
#[derive(Debug, Clone)]
pub struct Sssp {
    pub dist: Vec<Dist>,
    pub hops: Vec<u32>,
    pub parent: Vec<Vertex>,
    pub order: Vec<Vertex>,
}

/// Dijkstra from `s`, skipping every vertex with `banned[v]` set.
pub fn dijkstra(g: &WeightedDigraph, s: Vertex, dir: Direction, banned: Option<&[bool]>) -> Sssp {
    let n = g.n();
    let mut dist = vec![INF; n];
    let mut hops = vec![u32::MAX; n];
    let mut parent = vec![NONE; n];
    let mut done = vec![false; n];
    let mut order = Vec::new();
    let is_banned = |v: Vertex| banned.is_some_and(|b| b[v as usize]);
    if is_banned(s) {
        return Sssp { dist, hops, parent, order };
    }
    dist[s as usize] = 0;
    hops[s as usize] = 0;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0u64, 0u32, s)));
    while let Some(Reverse((d, h, u))) = heap.pop() {
        if done[u as usize] || (d, h) != (dist[u as usize], hops[u as usize]) {
            continue;
        }
        done[u as usize] = true;
        order.push(u);
        let mut relax = |v: Vertex, w: u64| {
            if is_banned(v) || done[v as usize] {
                return;
            }
            let cand = (dist_add(d, w), h + 1);
            let cur = (dist[v as usize], hops[v as usize]);
            if cand < cur {
                dist[v as usize] = cand.0;
                hops[v as usize] = cand.1;
                parent[v as usize] = u;
                heap.push(Reverse((cand.0, cand.1, v)));
            } else if cand == cur && u < parent[v as usize] {
                parent[v as usize] = u;
            }
        };
        match dir {
            Direction::Forward => g.out_edges(u).for_each(|e| relax(e.head, e.weight)),
            Direction::Reverse => g.in_edges(u).for_each(|e| relax(e.tail, e.weight)),
        }
    }
    Sssp { dist, hops, parent, order }
}

/// A rooted shortest-path tree with level-ancestor support.
///
/// For a forward tree `T_s` the root is `s` and depth is `|sv|`. For a
/// reverse tree `T̂_t` the root is `t`, the parent of `v` is the vertex after
/// `v` on `vt`, and depth is `|vt|`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShortestPathForest {
    pub source: Vertex,
    pub direction: Direction,
    pub dist: Vec<Dist>,
    pub parent: Vec<Vertex>,
    pub depth: Vec<u32>,
    /// Reachable vertices, parents before children.
    pub order: Vec<Vertex>,
    pub la: LevelAncestor,
}

impl ShortestPathForest {
    fn from_sssp(source: Vertex, direction: Direction, sp: Sssp) -> Self {
        let la = LevelAncestor::new(&sp.parent, &sp.order);
        Self { source, direction, dist: sp.dist, parent: sp.parent, depth: sp.hops, order: sp.order, la }
    }

    pub fn reachable(&self, v: Vertex) -> bool {
        self.dist[v as usize] != INF
    }

    /// Ancestor of `v` at depth `d`.
    #[inline]
    pub fn ancestor(&self, v: Vertex, d: u32) -> Vertex {
        self.la.ancestor_at_depth(v, d).unwrap_or(NONE)
    }

    /// The vertex at hop `offset` from the root on the tree path between the
    /// root and `x`. For a forward tree of `s` this is `s ⊕ offset` on `sx`;
    /// for a reverse tree of `t` it is `t ⊖ offset` on `xt`.
    pub fn on_path_vertex(&self, x: Vertex, offset: u32) -> Result<Vertex> {
        if x as usize >= self.dist.len() || !self.reachable(x) {
            return Err(DsoError::Contract(format!("vertex {x} not in tree of {}", self.source)));
        }
        if offset > self.depth[x as usize] {
            return Err(DsoError::Contract(format!("offset {offset} exceeds path length {}", self.depth[x as usize])));
        }
        Ok(self.ancestor(x, offset))
    }
}

/// Single-source shortest-path tree under the shared tie-break rule. The
/// reverse direction runs on the transpose graph.
pub fn sssp_tree(g: &WeightedDigraph, s: Vertex, dir: Direction) -> ShortestPathForest {
    assert!((s as usize) < g.n(), "source out of range");
    ShortestPathForest::from_sssp(s, dir, dijkstra(g, s, dir, None))
}

/// Vertex at hop `offset` on the canonical path `st`, looked up in `T_s` (for
/// a forward forest rooted at `s`) or `T̂_t` (for a reverse forest rooted at
/// `t`, where `offset` counts back from `t`).
pub fn on_path_vertex(forest: &ShortestPathForest, s: Vertex, t: Vertex, offset: u32) -> Result<Vertex> {
    match forest.direction {
        Direction::Forward if forest.source == s => forest.on_path_vertex(t, offset),
        Direction::Reverse if forest.source == t => forest.on_path_vertex(s, offset),
        _ => Err(DsoError::Contract("forest does not match the queried pair".into())),
    }
}

/// `‖sf‖ + ‖ft‖ = ‖st‖` with all three finite and `f ∉ {s, t}`.
///
/// `dist_fwd` holds distances from `s`, `dist_rev` distances to `t`. Under
/// ties this is "f lies on some shortest path"; see
/// [`AllPairs::on_canonical_path`] for membership in the canonical one.
pub fn is_on_path(dist_fwd: &[Dist], dist_rev: &[Dist], s: Vertex, t: Vertex, f: Vertex) -> bool {
    if f == s || f == t {
        return false;
    }
    let (st, sf, ft) = (dist_fwd[t as usize], dist_fwd[f as usize], dist_rev[f as usize]);
    st != INF && sf != INF && ft != INF && sf + ft == st
}

/// Canonical shortest paths between all pairs: forward trees `T_s` for every
/// source and reverse trees `T̂_t` derived from them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AllPairs {
    n: usize,
    dist: Vec<Dist>,
    hops: Vec<u32>,
    fwd: Vec<ShortestPathForest>,
    rev: Vec<ShortestPathForest>,
}

impl AllPairs {
    pub fn new(g: &WeightedDigraph, exec: Exec) -> Self {
        let n = g.n();
        let fwd: Vec<ShortestPathForest> = map_range(n, exec, |s| sssp_tree(g, s as Vertex, Direction::Forward));
        let mut dist = vec![INF; n * n];
        let mut hops = vec![u32::MAX; n * n];
        for (s, tr) in fwd.iter().enumerate() {
            dist[s * n..(s + 1) * n].copy_from_slice(&tr.dist);
            hops[s * n..(s + 1) * n].copy_from_slice(&tr.depth);
        }
        let rev = map_range(n, exec, |t| {
            let mut order: Vec<Vertex> = (0..n as Vertex).filter(|&s| dist[s as usize * n + t] != INF).collect();
            order.sort_by_key(|&s| hops[s as usize * n + t]);
            let mut parent = vec![NONE; n];
            for &s in &order {
                if s as usize != t {
                    parent[s as usize] = fwd[s as usize].ancestor(t as Vertex, 1);
                }
            }
            let col: Vec<Dist> = (0..n).map(|s| dist[s * n + t]).collect();
            let depth: Vec<u32> = (0..n).map(|s| hops[s * n + t]).collect();
            let la = LevelAncestor::new(&parent, &order);
            ShortestPathForest { source: t as Vertex, direction: Direction::Reverse, dist: col, parent, depth, order, la }
        });
        Self { n, dist, hops, fwd, rev }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dist(&self, s: Vertex, t: Vertex) -> Dist {
        self.dist[s as usize * self.n + t as usize]
    }

    /// `|st|`, or `u32::MAX` when unreachable.
    #[inline]
    pub fn hops(&self, s: Vertex, t: Vertex) -> u32 {
        self.hops[s as usize * self.n + t as usize]
    }

    /// Longest canonical path, in hops (0 when no pair is connected).
    pub fn max_hops(&self) -> u32 {
        self.hops.iter().copied().filter(|&h| h != u32::MAX).max().unwrap_or(0)
    }

    pub fn forward(&self, s: Vertex) -> &ShortestPathForest {
        &self.fwd[s as usize]
    }

    pub fn reverse(&self, t: Vertex) -> &ShortestPathForest {
        &self.rev[t as usize]
    }

    /// `s ⊕ p` on the canonical path `st`.
    #[inline]
    pub fn at(&self, s: Vertex, t: Vertex, p: u32) -> Vertex {
        self.fwd[s as usize].ancestor(t, p)
    }

    /// First vertex after `s` on `st` (`NONE` when `s == t`).
    #[inline]
    pub fn next(&self, s: Vertex, t: Vertex) -> Vertex {
        if s == t {
            NONE
        } else {
            self.at(s, t, 1)
        }
    }

    /// Whether `f` is an interior vertex of the canonical path `st`.
    pub fn on_canonical_path(&self, s: Vertex, t: Vertex, f: Vertex) -> bool {
        let (h, p) = (self.hops(s, t), self.hops(s, f));
        f != s && f != t && h != u32::MAX && p < h && self.at(s, t, p) == f
    }

    /// The canonical path `st` as a vertex list (empty when unreachable).
    pub fn path(&self, s: Vertex, t: Vertex) -> Vec<Vertex> {
        let h = self.hops(s, t);
        if h == u32::MAX {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(h as usize + 1);
        let mut v = t;
        while v != NONE {
            out.push(v);
            if v == s {
                break;
            }
            v = self.fwd[s as usize].parent[v as usize];
        }
        out.reverse();
        out
    }

    /// Words held by the level-ancestor indices of all trees.
    pub fn la_words(&self) -> usize {
        self.fwd.iter().chain(&self.rev).map(|t| t.la.words()).sum()
    }
}
