//! A shortest-path tree together with its marked set, nearest-marked-ancestor
//! addresses and the contracted tree over the marks.

use serde::{Deserialize, Serialize};

use crate::ancestor::LevelAncestor;
use crate::graph::{Vertex, NONE};
use crate::partition::{nearest_marked, partition_for_length};
use crate::tree::ShortestPathForest;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct MarkedTree {
    pub root: Vertex,
    /// Nearest marked ancestor-or-self, never the root.
    pub near: Vec<Vertex>,
    /// Shallowest vertex of the residual component, `NONE` for marks.
    pub comp: Vec<Vertex>,
    /// Marked vertices other than the root, by id.
    pub marks: Vec<Vertex>,
    /// Contracted tree on local ids: 0 is the root, `i + 1` is `marks[i]`.
    cla: LevelAncestor,
}

impl MarkedTree {
    pub fn build(tree: &ShortestPathForest, l: u32) -> Self {
        let root = tree.source;
        let ms = partition_for_length(tree, l as usize);
        let near = nearest_marked(tree, &ms);
        let marks: Vec<Vertex> = ms.marked.iter().copied().filter(|&m| m != root).collect();
        let mut comp = ms.component;
        if ms.marked.binary_search(&root).is_ok() {
            comp[root as usize] = root;
        }
        let local = |v: Vertex| marks.binary_search(&v).map_or(0, |i| i as Vertex + 1);
        let mut parent = vec![NONE; marks.len() + 1];
        let mut order = vec![0];
        for &v in &tree.order {
            if v != root && near[v as usize] == v {
                let up = near[tree.parent[v as usize] as usize];
                parent[local(v) as usize] = if up == NONE { 0 } else { local(up) };
                order.push(local(v));
            }
        }
        let cla = LevelAncestor::new(&parent, &order);
        Self { root, near, comp, marks, cla }
    }

    /// Index of mark `v` in [`MarkedTree::marks`].
    #[inline]
    pub fn local(&self, v: Vertex) -> Option<usize> {
        self.marks.binary_search(&v).ok()
    }

    #[inline]
    pub fn is_marked(&self, v: Vertex) -> bool {
        self.local(v).is_some()
    }

    #[inline]
    fn lid(&self, v: Vertex) -> Vertex {
        if v == self.root {
            0
        } else {
            self.local(v).map(|i| i as Vertex + 1).expect("contracted lookup of an unmarked vertex")
        }
    }

    /// Number of marks on the path from the root to mark `v`, `v` included.
    #[inline]
    pub fn cdepth(&self, v: Vertex) -> u32 {
        self.cla.depth(self.lid(v))
    }

    /// The mark at contracted depth `d` above mark `top` (the root for 0).
    #[inline]
    pub fn cla(&self, top: Vertex, d: u32) -> Vertex {
        match self.cla.ancestor_at_depth(self.lid(top), d) {
            Some(0) => self.root,
            Some(x) => self.marks[x as usize - 1],
            None => NONE,
        }
    }

    pub fn index_words(&self) -> usize {
        self.near.len() + self.comp.len() + self.marks.len() + self.cla.words()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::path_with_chords;
    use crate::par::Exec;
    use crate::tree::AllPairs;

    #[test]
    fn contracted_chain_on_a_path() {
        let g = path_with_chords(30, 0, 0);
        let ap = AllPairs::new(&g, Exec::Sequential);
        let mt = MarkedTree::build(ap.forward(0), 4);
        let t = 29;
        let chain: Vec<Vertex> = (0..=mt.cdepth(mt.near[t as usize])).map(|d| mt.cla(mt.near[t as usize], d)).collect();
        assert_eq!(chain[0], 0);
        for w in chain.windows(2) {
            assert!(w[0] < w[1] && w[1] - w[0] <= 4);
        }
        assert!(t - chain.last().unwrap() < 4);
        for v in 1..30 {
            let x = mt.near[v as usize];
            assert!(x == NONE || (x <= v && v - x < 4));
            assert_eq!(mt.comp[v as usize] == NONE, mt.is_marked(v));
        }
    }
}
