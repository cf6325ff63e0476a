//! Orientation-generic views of the canonical path system.
//!
//! Every structure exists in a forward flavour (rooted at the source, offsets
//! counted from `s`) and a mirrored one (rooted at the target, offsets counted
//! back from `t`). An oriented pair `(o, r, e)` names the path between root
//! `r` and end `e`; its real pair is `(r, e)` for [`Side::Fwd`] and `(e, r)`
//! for [`Side::Rev`].

use serde::{Deserialize, Serialize};

use crate::graph::{dist_add, Dist, Vertex, INF, NONE};
use crate::reference::Entry;
use crate::tree::{AllPairs, ShortestPathForest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Fwd,
    Rev,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Fwd, Side::Rev];

    #[inline]
    pub fn flip(self) -> Side {
        match self {
            Side::Fwd => Side::Rev,
            Side::Rev => Side::Fwd,
        }
    }

    #[inline]
    pub fn idx(self) -> usize {
        self as usize
    }

    /// Real `(source, target)` of the oriented pair.
    #[inline]
    pub fn real(self, r: Vertex, e: Vertex) -> (Vertex, Vertex) {
        match self {
            Side::Fwd => (r, e),
            Side::Rev => (e, r),
        }
    }
}

/// Concatenation of two real path pieces, `a` first.
#[inline]
pub fn cat(a: Entry, b: Entry) -> Entry {
    let dist = dist_add(a.dist, b.dist);
    if dist == INF {
        return Entry::INF;
    }
    Entry { dist, next: if a.next == NONE { b.next } else { a.next } }
}

/// Joins an oriented piece adjacent to the root with one adjacent to the end.
#[inline]
pub fn join(o: Side, root_piece: Entry, end_piece: Entry) -> Entry {
    match o {
        Side::Fwd => cat(root_piece, end_piece),
        Side::Rev => cat(end_piece, root_piece),
    }
}

impl AllPairs {
    pub fn tree(&self, o: Side, r: Vertex) -> &ShortestPathForest {
        match o {
            Side::Fwd => self.forward(r),
            Side::Rev => self.reverse(r),
        }
    }

    #[inline]
    pub fn odist(&self, o: Side, a: Vertex, b: Vertex) -> Dist {
        let (x, y) = o.real(a, b);
        self.dist(x, y)
    }

    #[inline]
    pub fn ohops(&self, o: Side, a: Vertex, b: Vertex) -> u32 {
        let (x, y) = o.real(a, b);
        self.hops(x, y)
    }

    /// Vertex at oriented offset `p` from `r` on the path between `r` and `e`.
    #[inline]
    pub fn oat(&self, o: Side, r: Vertex, e: Vertex, p: u32) -> Vertex {
        self.tree(o, r).ancestor(e, p)
    }

    /// The canonical piece between `a` (root side) and `b` as an entry.
    #[inline]
    pub fn piece(&self, o: Side, a: Vertex, b: Vertex) -> Entry {
        let (x, y) = o.real(a, b);
        let d = self.dist(x, y);
        if d == INF {
            Entry::INF
        } else {
            Entry { dist: d, next: self.next(x, y) }
        }
    }
}
