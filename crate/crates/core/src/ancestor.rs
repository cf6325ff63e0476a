//! Level-ancestor queries via ladder decomposition plus doubling jumps.
//!
//! `O(n log n)` words per forest, constant-time queries.

use serde::{Deserialize, Serialize};

use crate::graph::{Vertex, NONE};

/// Index of the most significant set bit: the largest `i` with `2^i <= x`.
///
/// # Panics
///
/// On `x == 0`.
#[inline]
pub fn msb(x: u64) -> u32 {
    assert!(x != 0, "msb of zero");
    63 - x.leading_zeros()
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct LevelAncestor {
    n: usize,
    depth: Vec<u32>,
    /// `jump[i * n + v]` is the `2^i`-th ancestor of `v`.
    jump: Vec<Vertex>,
    levels: usize,
    ladder_of: Vec<u32>,
    ladder_pos: Vec<u32>,
    ladders: Vec<Vec<Vertex>>,
}

impl LevelAncestor {
    /// Builds the index for a forest given by `parent` (`NONE` for roots and
    /// for nodes outside the forest). `order` lists every node of the forest
    /// with parents before children.
    pub fn new(parent: &[Vertex], order: &[Vertex]) -> Self {
        let n = parent.len();
        let mut depth = vec![0u32; n];
        for &v in order {
            let p = parent[v as usize];
            if p != NONE {
                depth[v as usize] = depth[p as usize] + 1;
            }
        }
        let max_depth = order.iter().map(|&v| depth[v as usize]).max().unwrap_or(0);
        let levels = if max_depth == 0 { 0 } else { msb(max_depth as u64) as usize + 1 };

        let mut jump = vec![NONE; levels * n];
        if levels > 0 {
            jump[..n].copy_from_slice(parent);
            for i in 1..levels {
                let (lo, hi) = jump.split_at_mut(i * n);
                let prev = &lo[(i - 1) * n..];
                for &v in order {
                    let mid = prev[v as usize];
                    hi[v as usize] = if mid == NONE { NONE } else { prev[mid as usize] };
                }
            }
        }

        // Long-path decomposition: heavy child is the one of maximum height.
        let mut height = vec![0u32; n];
        let mut heavy = vec![NONE; n];
        for &v in order.iter().rev() {
            let p = parent[v as usize];
            if p != NONE {
                let cand = height[v as usize] + 1;
                let hp = &mut height[p as usize];
                let hv = heavy[p as usize];
                if hv == NONE || cand > *hp || (cand == *hp && v < hv) {
                    *hp = cand;
                    heavy[p as usize] = v;
                }
            }
        }
        let mut ladder_of = vec![u32::MAX; n];
        let mut ladder_pos = vec![0u32; n];
        let mut ladders = Vec::new();
        for &v in order {
            let p = parent[v as usize];
            if p != NONE && heavy[p as usize] == v {
                continue;
            }
            // v tops a long path.
            let mut path = Vec::new();
            let mut x = v;
            while x != NONE {
                path.push(x);
                x = heavy[x as usize];
            }
            let mut ext = Vec::new();
            let mut a = p;
            while a != NONE && ext.len() < path.len() {
                ext.push(a);
                a = parent[a as usize];
            }
            ext.reverse();
            let off = ext.len();
            let id = ladders.len() as u32;
            for (i, &x) in path.iter().enumerate() {
                ladder_of[x as usize] = id;
                ladder_pos[x as usize] = (off + i) as u32;
            }
            ext.extend_from_slice(&path);
            ladders.push(ext);
        }
        Self { n, depth, jump, levels, ladder_of, ladder_pos, ladders }
    }

    pub fn depth(&self, v: Vertex) -> u32 {
        self.depth[v as usize]
    }

    /// Ancestor of `v` at depth `d` (`d <= depth(v)`), or `None` when out of range.
    #[inline]
    pub fn ancestor_at_depth(&self, v: Vertex, d: u32) -> Option<Vertex> {
        let dv = *self.depth.get(v as usize)?;
        if d > dv || self.ladder_of[v as usize] == u32::MAX {
            return None;
        }
        let k = dv - d;
        if k == 0 {
            return Some(v);
        }
        let i = msb(k as u64) as usize;
        let u = self.jump[i * self.n + v as usize];
        let r = k - (1 << i);
        let lad = &self.ladders[self.ladder_of[u as usize] as usize];
        let pos = self.ladder_pos[u as usize];
        Some(lad[(pos - r) as usize])
    }

    /// Number of stored words (jump table plus ladders), for space reports.
    pub fn words(&self) -> usize {
        self.jump.len() + self.ladders.iter().map(Vec::len).sum::<usize>() + 3 * self.n
    }

    pub fn levels(&self) -> usize {
        self.levels
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn msb_values() {
        assert_eq!(msb(1), 0);
        assert_eq!(msb(2), 1);
        assert_eq!(msb(12), 3);
        for i in 0..32u32 {
            assert_eq!(msb(1 << i), i);
            if i > 0 {
                for r in [1u64, (1 << i) - 1, (1 << i) / 3 + 1] {
                    if r > 0 && r < (1 << i) {
                        assert_eq!(msb((1u64 << i) + r), i);
                    }
                }
            }
        }
    }

    #[test]
    #[should_panic]
    fn msb_zero_panics() {
        msb(0);
    }

    fn naive(parent: &[Vertex], mut v: Vertex, steps: u32) -> Vertex {
        for _ in 0..steps {
            v = parent[v as usize];
        }
        v
    }

    #[test]
    fn agrees_with_parent_walking() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checks = 0;
        while checks < 10_000 {
            let n = rng.gen_range(1..300usize);
            // Random recursive tree, with a bias toward long paths.
            let mut parent = vec![NONE; n];
            for (v, slot) in parent.iter_mut().enumerate().skip(1) {
                *slot = if rng.gen_bool(0.7) { (v - 1) as Vertex } else { rng.gen_range(0..v) as Vertex };
            }
            let order: Vec<Vertex> = (0..n as Vertex).collect();
            let la = LevelAncestor::new(&parent, &order);
            for _ in 0..200 {
                let v = rng.gen_range(0..n) as Vertex;
                let d = rng.gen_range(0..=la.depth(v));
                let want = naive(&parent, v, la.depth(v) - d);
                assert_eq!(la.ancestor_at_depth(v, d), Some(want));
                checks += 1;
            }
        }
    }

    #[test]
    fn out_of_range_depth() {
        let parent = vec![NONE, 0, 1];
        let la = LevelAncestor::new(&parent, &[0, 1, 2]);
        assert_eq!(la.ancestor_at_depth(2, 3), None);
        assert_eq!(la.ancestor_at_depth(2, 0), Some(0));
    }
}
