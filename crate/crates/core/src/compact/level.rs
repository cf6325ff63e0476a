//! One level of the marked-set structures: per oriented pair `(o, r, e)` with
//! `e` marked in the tree of `r`, replacement values at the chain vertices
//! `u_{p−2^j}`, admissible values between consecutive ones and across the two
//! chains, windows of exact values near both ends, and per pair the value for
//! the interval between the two nearest marks.

use serde::{Deserialize, Serialize};

use super::marked::MarkedTree;
use crate::ancestor::msb;
use crate::error::{DsoError, Result};
use crate::graph::{Vertex, NONE};
use crate::orient::{join, Side};
use crate::par::{map_range, Exec};
use crate::provider::Provider;
use crate::reference::Entry;
use crate::sparse::min_entry;
use crate::trace::{Route, Trace};
use crate::tree::AllPairs;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub(crate) struct MarkTables {
    /// `‖re⋄u_{p−2^j}‖` for `2^j ≤ p − 1`.
    pub rep: Vec<Entry>,
    /// Admissible for `[u_{p−2^j}, u_{p−2^j+1}]`, `j ≥ 1`, at `j − 1`.
    pub two: Vec<Entry>,
    /// Admissible for `[v_{q−2^i}, u_{p−2^j}]` at `i * nj + j`; `None` when
    /// the interval is empty.
    pub cross: Vec<Option<Entry>>,
    pub nj: u32,
    /// Exact values at offsets `1..=head.len()`.
    pub head: Vec<Entry>,
    /// Exact values at offsets `h − 1 − k`.
    pub tail: Vec<Entry>,
}

impl MarkTables {
    pub fn entries(&self) -> usize {
        self.rep.len() + self.two.len() + self.cross.iter().flatten().count() + self.head.len() + self.tail.len()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct LevelTree {
    pub mt: MarkedTree,
    /// Per mark, aligned with `mt.marks`; empty beyond the length limit.
    pub tabs: Vec<MarkTables>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct Level {
    pub l: u32,
    /// Pairs longer than this carry no tables.
    pub max_len: u32,
    pub trees: [Vec<LevelTree>; 2],
    /// Admissible for `[y, x]` per real pair, `n * s + t`.
    pub split: Vec<Option<Entry>>,
}

pub(crate) enum Shortness {
    Target,
    Source,
    No { x: Vertex, y: Vertex },
}

/// Offsets `c ≥ 1` of powers: number of `j` with `2^j ≤ m`.
#[inline]
pub(crate) fn pows_upto(m: u32) -> u32 {
    if m == 0 {
        0
    } else {
        msb(m as u64) + 1
    }
}

impl Level {
    /// A level with no marks, for when every path fits a coarser structure.
    pub fn empty(l: u32) -> Level {
        Level { l, max_len: u32::MAX, trees: [Vec::new(), Vec::new()], split: Vec::new() }
    }

    pub fn build(p: &impl Provider, l: u32, max_len: u32, exec: Exec) -> Result<Level> {
        let ap = p.paths();
        let n = ap.n();
        let marked = |o: Side| map_range(n, exec, |r| MarkedTree::build(ap.tree(o, r as Vertex), l));
        let mts = [marked(Side::Fwd), marked(Side::Rev)];
        let mut trees: [Vec<LevelTree>; 2] = [Vec::new(), Vec::new()];
        for o in Side::BOTH {
            let built: Vec<Result<Vec<MarkTables>>> = map_range(n, exec, |r| {
                let r = r as Vertex;
                let mt = &mts[o.idx()][r as usize];
                mt.marks.iter().map(|&e| mark_tables(p, &mts, l, max_len, o, r, e)).collect()
            });
            for (mt, tabs) in mts[o.idx()].iter().zip(built) {
                trees[o.idx()].push(LevelTree { mt: mt.clone(), tabs: tabs? });
            }
        }
        let rows: Vec<Result<Vec<Option<Entry>>>> = map_range(n, exec, |s| {
            let s = s as Vertex;
            (0..n as Vertex).map(|t| split_entry(p, &trees, max_len, s, t)).collect()
        });
        let mut split = Vec::with_capacity(n * n);
        for row in rows {
            split.extend(row?);
        }
        Ok(Level { l, max_len, trees, split })
    }

    #[inline]
    pub fn tree(&self, o: Side, r: Vertex) -> &LevelTree {
        &self.trees[o.idx()][r as usize]
    }

    pub fn entries(&self) -> usize {
        let t: usize = self.trees.iter().flatten().flat_map(|lt| lt.tabs.iter()).map(MarkTables::entries).sum();
        t + self.split.iter().flatten().count()
    }

    pub fn index_words(&self) -> usize {
        self.trees.iter().flatten().map(|lt| lt.mt.index_words() + lt.tabs.len()).sum::<usize>() + self.split.len() / 8
    }

    #[inline]
    fn tabs(&self, o: Side, r: Vertex, e: Vertex, tr: &mut Trace) -> Result<&MarkTables> {
        tr.probe(1);
        let lt = self.tree(o, r);
        lt.mt.local(e).map(|k| &lt.tabs[k]).ok_or_else(|| DsoError::Internal(format!("{e} is not marked in the {o:?} tree of {r} (l = {})", self.l)))
    }

    /// Short/non-short classification of `f = s ⊕ pf` on `st`.
    pub fn classify(&self, ap: &AllPairs, s: Vertex, t: Vertex, pf: u32, tr: &mut Trace) -> Shortness {
        tr.probe(2);
        let x = self.tree(Side::Fwd, s).mt.near[t as usize];
        let y = self.tree(Side::Rev, t).mt.near[s as usize];
        tr.probe(2);
        if x == NONE || ap.hops(s, x) < pf {
            Shortness::Target
        } else if y == NONE || ap.hops(s, y) > pf {
            Shortness::Source
        } else {
            Shortness::No { x, y }
        }
    }

    /// Exact value from the end windows of `(o, r, e)`.
    pub fn iv(&self, ap: &AllPairs, o: Side, r: Vertex, e: Vertex, pf: u32, tr: &mut Trace) -> Result<Entry> {
        let tb = self.tabs(o, r, e, tr)?;
        tr.probe(1);
        if pf >= 1 && pf as usize <= tb.head.len() {
            return Ok(tb.head[pf as usize - 1]);
        }
        let h = ap.ohops(o, r, e);
        let k = h.wrapping_sub(1).wrapping_sub(pf) as usize;
        tb.tail.get(k).copied().ok_or_else(|| DsoError::Internal(format!("offset {pf} of ({o:?}, {r}, {e}) outside both windows")))
    }

    /// `‖st⋄f‖` when `f` is short for neither endpoint.
    #[allow(clippy::too_many_arguments)]
    pub fn nonshort(&self, ap: &AllPairs, s: Vertex, t: Vertex, f: Vertex, h: u32, pf: u32, x: Vertex, y: Vertex, tr: &mut Trace) -> Result<Entry> {
        if x == t {
            return self.main(ap, Side::Fwd, s, t, f, pf, tr);
        }
        if y == s {
            return self.main(ap, Side::Rev, t, s, f, h - pf, tr);
        }
        tr.hit(if self.max_len == u32::MAX { Route::SplitYX } else { Route::Level2Split });
        tr.probe(4);
        let via_y = if f == y { Entry::INF } else { join(Side::Fwd, ap.piece(Side::Fwd, s, y), self.main(ap, Side::Rev, t, y, f, h - pf, tr)?) };
        let via_x = if f == x { Entry::INF } else { join(Side::Fwd, self.main(ap, Side::Fwd, s, x, f, pf, tr)?, ap.piece(Side::Fwd, x, t)) };
        let skip = self.split[s as usize * ap.n() + t as usize]
            .ok_or_else(|| DsoError::Internal(format!("no interval value between the nearest marks of ({s}, {t})")))?;
        Ok(min_entry(&[via_y, via_x, skip]))
    }

    /// `‖re⋄f‖` in orientation `o` for `e` marked in the tree of `r` and `f`
    /// at oriented offset `pf`.
    #[allow(clippy::too_many_arguments)]
    pub fn main(&self, ap: &AllPairs, o: Side, r: Vertex, e: Vertex, f: Vertex, pf: u32, tr: &mut Trace) -> Result<Entry> {
        tr.probe(1);
        let h = ap.ohops(o, r, e);
        if pf <= 2 * self.l || h - pf <= 2 * self.l {
            tr.hit(Route::MainNear);
            return self.iv(ap, o, r, e, pf, tr);
        }
        tr.hit(Route::MainFar);
        let (mt, mt2) = (&self.tree(o, r).mt, &self.tree(o.flip(), e).mt);
        tr.probe(6);
        let ua = mt.near[f as usize];
        let vb = mt2.near[f as usize];
        let vq = mt2.near[r as usize];
        if ua == NONE || vb == NONE || vq == NONE {
            return Err(DsoError::Internal(format!("missing nearest mark for {f} on ({o:?}, {r}, {e})")));
        }
        let (a, p) = (mt.cdepth(ua), mt.cdepth(e));
        let (b, q) = (mt2.cdepth(vb), mt2.cdepth(vq));
        if p < a + 2 || q < b + 2 {
            return Err(DsoError::Internal(format!("chains too short around {f} on ({o:?}, {r}, {e})")));
        }
        let j = msb((p - a - 1) as u64);
        let i = msb((q - b - 1) as u64);
        let t2 = self.term(ap, o, r, e, e, vq, f, pf, ua, a, j, tr)?;
        let t3 = self.term(ap, o.flip(), e, r, vq, e, f, h - pf, vb, b, i, tr)?;
        let tb = self.tabs(o, r, e, tr)?;
        tr.probe(1);
        let t1 = tb.cross[(i * tb.nj + j) as usize].ok_or_else(|| DsoError::Internal(format!("cross interval ({i}, {j}) missing on ({o:?}, {r}, {e})")))?;
        Ok(min_entry(&[t2, t3, t1]))
    }

    /// An upper bound on `‖re⋄f‖` that is exact whenever the replacement
    /// path leaves `re` after `u_a`'s predecessor mark on the other side and
    /// rejoins before `u_{p−2^j}`.
    #[allow(clippy::too_many_arguments)]
    fn term(
        &self,
        ap: &AllPairs,
        o: Side,
        r: Vertex,
        e: Vertex,
        top: Vertex,
        top_other: Vertex,
        f: Vertex,
        pf: u32,
        ua: Vertex,
        a: u32,
        j: u32,
        tr: &mut Trace,
    ) -> Result<Entry> {
        let (mt, mt2) = (&self.tree(o, r).mt, &self.tree(o.flip(), e).mt);
        tr.probe(3);
        let w = mt.cla(top, a + (1 << j));
        let we = ap.piece(o, w, e);
        if f == ua {
            tr.hit(Route::TermMarkedFailure);
            let tb = self.tabs(o, r, w, tr)?;
            tr.probe(1);
            let rep = *tb.rep.get(j as usize).ok_or_else(|| DsoError::Internal(format!("(i)[{j}] missing for {w}")))?;
            return Ok(join(o, rep, we));
        }
        let skip = if j >= 1 {
            let tb = self.tabs(o, r, w, tr)?;
            tr.probe(1);
            join(o, *tb.two.get(j as usize - 1).ok_or_else(|| DsoError::Internal(format!("(ii)[{j}] missing for {w}")))?, we)
        } else {
            tr.hit(Route::TermNoSecondInterval);
            Entry::INF
        };
        tr.probe(2);
        let u1 = mt.cla(top, a + 1);
        let near_end = join(o, self.iv(ap, o, r, u1, pf, tr)?, ap.piece(o, u1, e));
        tr.probe(1);
        let v = if mt2.is_marked(ua) {
            ua
        } else {
            tr.hit(Route::TermCrossFromReverse);
            tr.probe(3);
            let vc = mt2.near[ua as usize];
            if vc == NONE {
                return Err(DsoError::Internal(format!("no mark after {ua} toward {e}")));
            }
            mt2.cla(top_other, mt2.cdepth(vc) + 1)
        };
        if v == NONE {
            return Err(DsoError::Internal(format!("no mark before {ua} toward {r}")));
        }
        tr.probe(2);
        let near_root = join(o, ap.piece(o, r, v), self.iv(ap, o.flip(), e, v, ap.ohops(o, r, e) - pf, tr)?);
        Ok(min_entry(&[near_end, near_root, skip]))
    }
}

fn mark_tables(p: &impl Provider, mts: &[Vec<MarkedTree>; 2], l: u32, max_len: u32, o: Side, r: Vertex, e: Vertex) -> Result<MarkTables> {
    let ap = p.paths();
    let h = ap.ohops(o, r, e);
    if h > max_len || h < 2 {
        return Ok(MarkTables::default());
    }
    let ctx = |what: &str, err: DsoError| DsoError::Internal(format!("{what} on ({o:?}, {r}, {e}): {err}"));
    let mt = &mts[o.idx()][r as usize];
    let pdep = mt.cdepth(e);
    let u = |c: u32| mt.cla(e, c);
    let off = |v: Vertex| ap.ohops(o, r, v);
    let nj = pows_upto(pdep.saturating_sub(1));
    let mut tb = MarkTables { nj, ..Default::default() };
    for j in 0..nj {
        tb.rep.push(p.orep(o, r, e, off(u(pdep - (1 << j)))));
        if j >= 1 {
            let lo = off(u(pdep - (1 << j)));
            let hi = off(u(pdep - (1 << j) + 1));
            tb.two.push(p.oadm(o, r, e, lo, hi).map_err(|err| ctx("(ii)", err))?);
        }
    }
    let mt2 = &mts[o.flip().idx()][e as usize];
    let vq = mt2.near[r as usize];
    let q = if vq == NONE { 0 } else { mt2.cdepth(vq) };
    let ni = pows_upto(q.saturating_sub(1));
    for i in 0..ni {
        let lo = off(mt2.cla(vq, q - (1 << i)));
        for j in 0..nj {
            let hi = off(u(pdep - (1 << j)));
            tb.cross.push(if lo <= hi { Some(p.oadm(o, r, e, lo, hi).map_err(|err| ctx("(iii)", err))?) } else { None });
        }
    }
    if h - 1 <= 4 * l {
        tb.head = (1..h).map(|c| p.orep(o, r, e, c)).collect();
    } else {
        tb.head = (1..=2 * l).map(|c| p.orep(o, r, e, c)).collect();
        tb.tail = (0..2 * l).map(|k| p.orep(o, r, e, h - 1 - k)).collect();
    }
    Ok(tb)
}

fn split_entry(p: &impl Provider, trees: &[Vec<LevelTree>; 2], max_len: u32, s: Vertex, t: Vertex) -> Result<Option<Entry>> {
    let ap = p.paths();
    let h = ap.hops(s, t);
    if h == u32::MAX || h < 2 || h > max_len {
        return Ok(None);
    }
    let x = trees[0][s as usize].mt.near[t as usize];
    let y = trees[1][t as usize].mt.near[s as usize];
    if x == NONE || y == NONE || x == t || y == s {
        return Ok(None);
    }
    let (ox, oy) = (ap.hops(s, x), ap.hops(s, y));
    if oy > ox {
        return Ok(None);
    }
    p.admissible(s, t, oy, ox).map(Some).map_err(|err| DsoError::Internal(format!("(v) on ({s}, {t}): {err}")))
}
