//! Enumerates stored admissible values together with their intervals.

use super::full::Full;
use super::level::{pows_upto, Level};
use super::CompactOracle;
use crate::graph::{Vertex, NONE};
use crate::orient::Side;
use crate::provider::StoredInterval;
use crate::tree::AllPairs;

fn level_intervals(ap: &AllPairs, lv: &Level, out: &mut Vec<StoredInterval>) {
    let n = ap.n() as Vertex;
    if lv.trees[0].is_empty() {
        return;
    }
    for o in Side::BOTH {
        for r in 0..n {
            let lt = lv.tree(o, r);
            for (k, &e) in lt.mt.marks.iter().enumerate() {
                let tb = &lt.tabs[k];
                if tb.head.is_empty() {
                    continue;
                }
                let off = |v: Vertex| ap.ohops(o, r, v);
                let p = lt.mt.cdepth(e);
                let u = |c: u32| lt.mt.cla(e, c);
                for j in 1..pows_upto(p.saturating_sub(1)) {
                    let (lo, hi) = (off(u(p - (1 << j))), off(u(p - (1 << j) + 1)));
                    out.push(StoredInterval::oriented(ap, o, r, e, lo, hi, tb.two[j as usize - 1].dist));
                }
                let mt2 = &lv.tree(o.flip(), e).mt;
                let vq = mt2.near[r as usize];
                let q = if vq == NONE { 0 } else { mt2.cdepth(vq) };
                for i in 0..pows_upto(q.saturating_sub(1)) {
                    let lo = off(mt2.cla(vq, q - (1 << i)));
                    for j in 0..tb.nj {
                        if let Some(v) = tb.cross[(i * tb.nj + j) as usize] {
                            out.push(StoredInterval::oriented(ap, o, r, e, lo, off(u(p - (1 << j))), v.dist));
                        }
                    }
                }
            }
        }
    }
    for s in 0..n {
        for t in 0..n {
            if let Some(v) = lv.split[s as usize * n as usize + t as usize] {
                let x = lv.tree(Side::Fwd, s).mt.near[t as usize];
                let y = lv.tree(Side::Rev, t).mt.near[s as usize];
                out.push(StoredInterval { s, t, lo: ap.hops(s, y), hi: ap.hops(s, x), value: v.dist });
            }
        }
    }
}

fn full_intervals(ap: &AllPairs, one: &Level, full: &Full, out: &mut Vec<StoredInterval>) {
    let n = ap.n() as Vertex;
    for o in Side::BOTH {
        for r in 0..n {
            let mt2 = &full.two.tree(o, r).mt;
            let off = |v: Vertex| ap.ohops(o, r, v);
            for e in 0..n {
                if let Some(v) = full.reduce[o.idx()][r as usize * n as usize + e as usize] {
                    let c = one.tree(o, r).mt.comp[e as usize];
                    let u = mt2.near[e as usize];
                    out.push(StoredInterval::oriented(ap, o, r, e, off(c), off(u), v.dist));
                }
            }
            for (k, &e) in mt2.marks.iter().enumerate() {
                let Some(ct) = &full.chains[o.idx()][r as usize][k] else { continue };
                let c = one.tree(o, r).mt.comp[e as usize];
                let nc = mt2.near[c as usize];
                let base = if nc == NONE { 0 } else { mt2.cdepth(nc) };
                let p = mt2.cdepth(e) - base;
                for (i, v) in ct.ints.iter().enumerate() {
                    let hi = off(mt2.cla(e, base + p - (1 << i)));
                    out.push(StoredInterval::oriented(ap, o, r, e, off(c), hi, v.dist));
                }
            }
        }
    }
    for (&(u, v), e) in &full.tab.pairwise {
        out.push(StoredInterval { s: u, t: v, lo: 1, hi: ap.hops(u, v) - 1, value: e.dist });
    }
}

impl CompactOracle {
    /// Every stored admissible value with the real interval it covers.
    pub fn stored_intervals(&self) -> Vec<StoredInterval> {
        let mut out = Vec::new();
        level_intervals(&self.ap, &self.one, &mut out);
        if let Some(t) = &self.capped {
            out.extend(t.intervals(&self.ap));
        }
        if let Some(f) = &self.full {
            level_intervals(&self.ap, &f.two, &mut out);
            full_intervals(&self.ap, &self.one, f, &mut out);
        }
        out
    }
}
