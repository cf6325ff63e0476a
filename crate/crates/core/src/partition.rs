//! Tree partition: a marked set `M` with `|M| ≤ 3k − 5` whose removal leaves
//! components of at most `n/k` vertices, in `O(n log k)` time.

use serde::{Deserialize, Serialize};

use crate::error::{DsoError, Result};
use crate::graph::{Vertex, NONE};
use crate::tree::ShortestPathForest;

/// A rooted tree given by a parent array over global vertex ids, plus the
/// list of its vertices with parents before children.
pub trait RootedTree {
    fn parent(&self) -> &[Vertex];
    fn order(&self) -> &[Vertex];
}

impl RootedTree for ShortestPathForest {
    fn parent(&self) -> &[Vertex] {
        &self.parent
    }
    fn order(&self) -> &[Vertex] {
        &self.order
    }
}

/// A plain rooted tree, mostly for tests.
#[derive(Debug, Clone)]
pub struct ParentTree {
    pub parent: Vec<Vertex>,
    pub order: Vec<Vertex>,
}

impl ParentTree {
    /// Every vertex belongs to the tree; exactly one has parent `NONE`.
    pub fn new(parent: Vec<Vertex>) -> Self {
        let n = parent.len();
        let mut kids = vec![Vec::new(); n];
        let mut order = Vec::with_capacity(n);
        for (v, &p) in parent.iter().enumerate() {
            if p == NONE {
                order.push(v as Vertex);
            } else {
                kids[p as usize].push(v as Vertex);
            }
        }
        let mut i = 0;
        while i < order.len() {
            let v = order[i] as usize;
            order.extend_from_slice(&kids[v]);
            i += 1;
        }
        Self { parent, order }
    }
}

impl RootedTree for ParentTree {
    fn parent(&self) -> &[Vertex] {
        &self.parent
    }
    fn order(&self) -> &[Vertex] {
        &self.order
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct MarkedSet {
    /// Marked vertices in increasing id order.
    pub marked: Vec<Vertex>,
    /// Per vertex: the shallowest vertex of its residual component, or `NONE`
    /// for marked vertices and vertices outside the tree.
    pub component: Vec<Vertex>,
    pub component_root: Vec<Vertex>,
    pub k: usize,
    /// Number of tree vertices.
    pub n: usize,
}

impl MarkedSet {
    pub fn is_marked(&self, v: Vertex) -> bool {
        self.marked.binary_search(&v).is_ok()
    }

    /// The stated bound on `|M|`: 1 for `k = 2`, `3k − 5` above, 0 below.
    pub fn bound(k: usize) -> usize {
        match k {
            0 | 1 => 0,
            2 => 1,
            _ => 3 * k - 5,
        }
    }
}

struct Work<'a> {
    parent: &'a [Vertex],
    order: &'a [Vertex],
    kid_start: Vec<u32>,
    kids: Vec<Vertex>,
}

impl<'a> Work<'a> {
    fn new(tree: &'a impl RootedTree) -> Self {
        let (parent, order) = (tree.parent(), tree.order());
        let n = parent.len();
        let mut in_tree = vec![false; n];
        for &v in order {
            in_tree[v as usize] = true;
        }
        let mut kid_start = vec![0u32; n + 1];
        for v in 0..n {
            if in_tree[v] && parent[v] != NONE {
                kid_start[parent[v] as usize + 1] += 1;
            }
        }
        for i in 0..n {
            kid_start[i + 1] += kid_start[i];
        }
        let mut fill = kid_start.clone();
        let mut kids = vec![0; kid_start[n] as usize];
        for v in 0..n {
            if in_tree[v] && parent[v] != NONE {
                let p = parent[v] as usize;
                kids[fill[p] as usize] = v as Vertex;
                fill[p] += 1;
            }
        }
        Self { parent, order, kid_start, kids }
    }

    fn kids(&self, v: Vertex) -> &[Vertex] {
        &self.kids[self.kid_start[v as usize] as usize..self.kid_start[v as usize + 1] as usize]
    }

    /// Subtree sizes restricted to residual components.
    fn comp_sizes(&self, marked: &[bool]) -> Vec<u32> {
        let mut size = vec![0u32; self.parent.len()];
        for &v in self.order.iter().rev() {
            if marked[v as usize] {
                continue;
            }
            size[v as usize] += 1;
            let p = self.parent[v as usize];
            if p != NONE && !marked[p as usize] {
                size[p as usize] += size[v as usize];
            }
        }
        size
    }

    /// Descends from component root `c` into any child holding at least half
    /// of the component; the stopping vertex splits it into halves.
    fn base(&self, c: Vertex, marked: &[bool], size: &[u32]) -> Vertex {
        let total = size[c as usize] as u64;
        let mut v = c;
        'descend: loop {
            for &ch in self.kids(v) {
                if !marked[ch as usize] && 2 * size[ch as usize] as u64 >= total {
                    v = ch;
                    continue 'descend;
                }
            }
            return v;
        }
    }

    fn marks(&self, k: usize) -> Vec<bool> {
        let n = self.order.len();
        let mut marked = vec![false; self.parent.len()];
        if k <= 1 || n == 0 {
            return marked;
        }
        if k == 2 {
            let size = self.comp_sizes(&marked);
            let v = self.base(self.order[0], &marked, &size);
            marked[v as usize] = true;
            return marked;
        }
        let half = k.div_ceil(2);
        let mut marked = self.marks(half);
        let size = self.comp_sizes(&marked);
        let mut picks = Vec::new();
        for &v in self.order {
            let p = self.parent[v as usize];
            let is_root = !marked[v as usize] && (p == NONE || marked[p as usize]);
            if is_root && size[v as usize] as usize * 2 * half > n {
                picks.push(self.base(v, &marked, &size));
            }
        }
        for v in picks {
            marked[v as usize] = true;
        }
        marked
    }

    fn finish(&self, marked: Vec<bool>, k: usize) -> MarkedSet {
        let mut component = vec![NONE; self.parent.len()];
        let mut component_root = Vec::new();
        for &v in self.order {
            if marked[v as usize] {
                continue;
            }
            let p = self.parent[v as usize];
            if p != NONE && !marked[p as usize] {
                component[v as usize] = component[p as usize];
            } else {
                component[v as usize] = v;
                component_root.push(v);
            }
        }
        let list = (0..marked.len() as Vertex).filter(|&v| marked[v as usize]).collect();
        MarkedSet { marked: list, component, component_root, k, n: self.order.len() }
    }
}

/// The single vertex whose removal leaves components of at most `n/2`.
pub fn partition_base(tree: &impl RootedTree) -> Vertex {
    let w = Work::new(tree);
    assert!(!w.order.is_empty(), "empty tree");
    let marked = vec![false; w.parent.len()];
    let size = w.comp_sizes(&marked);
    w.base(w.order[0], &marked, &size)
}

/// Marked set for parameter `k` (`2 ≤ k ≤ n`).
pub fn partition(tree: &impl RootedTree, k: usize) -> Result<MarkedSet> {
    let n = tree.order().len();
    if k < 2 || k > n {
        return Err(DsoError::Contract(format!("partition parameter k={k} outside [2, {n}]")));
    }
    let w = Work::new(tree);
    Ok(w.finish(w.marks(k), k))
}

/// Marked set whose components hold at most `l − 1` vertices, so that
/// consecutive marks on any root path are at most `l` hops apart. Uses
/// `k = ⌈n/(l−1)⌉`; for `k ≤ 1` nothing is marked.
pub fn partition_for_length(tree: &impl RootedTree, l: usize) -> MarkedSet {
    assert!(l >= 2, "length parameter must be at least 2");
    let w = Work::new(tree);
    let k = w.order.len().div_ceil(l - 1);
    w.finish(w.marks(k), k)
}

/// Per vertex: its nearest marked ancestor-or-self, never the tree root
/// (`NONE` when no marked vertex lies strictly below the root on the path).
pub fn nearest_marked(tree: &impl RootedTree, ms: &MarkedSet) -> Vec<Vertex> {
    let (parent, order) = (tree.parent(), tree.order());
    let mut near = vec![NONE; parent.len()];
    for &v in order {
        let p = parent[v as usize];
        if p == NONE {
            continue;
        }
        near[v as usize] = if ms.is_marked(v) { v } else { near[p as usize] };
    }
    near
}

/// Recomputes components by traversal and checks every invariant.
pub fn check_partition(tree: &impl RootedTree, ms: &MarkedSet) -> std::result::Result<(), String> {
    let (parent, order) = (tree.parent(), tree.order());
    let n = order.len();
    if ms.n != n {
        return Err(format!("tree size {n} but marked set built for {}", ms.n));
    }
    let mut marked = vec![false; parent.len()];
    for &v in &ms.marked {
        marked[v as usize] = true;
    }
    if ms.marked.len() > MarkedSet::bound(ms.k) {
        return Err(format!("{} marked vertices exceed bound for k={}", ms.marked.len(), ms.k));
    }
    let mut root = vec![NONE; parent.len()];
    let mut size = vec![0usize; parent.len()];
    for &v in order {
        if marked[v as usize] {
            if ms.component[v as usize] != NONE {
                return Err(format!("marked vertex {v} carries a component label"));
            }
            continue;
        }
        let p = parent[v as usize];
        root[v as usize] = if p != NONE && !marked[p as usize] { root[p as usize] } else { v };
        if ms.component[v as usize] != root[v as usize] {
            return Err(format!("vertex {v} labeled {} but lies in component of {}", ms.component[v as usize], root[v as usize]));
        }
        size[root[v as usize] as usize] += 1;
    }
    for &r in order {
        if size[r as usize] * ms.k.max(1) > n {
            return Err(format!("component of {r} has {} vertices, over n/k = {n}/{}", size[r as usize], ms.k));
        }
    }
    Ok(())
}

/// [`check_partition`] as a predicate; prints the diagnostic on failure.
pub fn verify_partition(tree: &impl RootedTree, ms: &MarkedSet) -> bool {
    match check_partition(tree, ms) {
        Ok(()) => true,
        Err(msg) => {
            eprintln!("partition check failed: {msg}");
            false
        }
    }
}
