//! Second-level structures for paths whose failure is short: a finer marked
//! set restricted to paths of at most `L` hops, chain tables between the
//! component root and the finer marks, and a dictionary of small matrices
//! giving the divergence and convergence offsets inside each finer component.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::level::{pows_upto, Level, Shortness};
use crate::ancestor::msb;
use crate::error::{DsoError, Result};
use crate::graph::{dist_add, Dist, Vertex, INF, NONE};
use crate::orient::{join, Side};
use crate::par::{map_range, Exec};
use crate::provider::Provider;
use crate::reference::Entry;
use crate::sparse::min_entry;
use crate::trace::{Route, Trace};
use crate::tree::AllPairs;

pub(crate) const OFF_PATH: u32 = u32::MAX;
pub(crate) const UNREACHABLE: u32 = u32::MAX - 1;
pub(crate) const FAR: u32 = u32::MAX - 2;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub(crate) struct ChainTables {
    /// Admissible for `[r, u_{p−2^i}]`.
    pub ints: Vec<Entry>,
    /// Offset of `u_{p−1}`; `exact[k]` is the value at offset `start + k`.
    pub start: u32,
    pub exact: Vec<Entry>,
}

/// Cells `(|rΔ|, |∇e|)` in the orientation of the matrix, rows by end
/// vertex and columns by failure, both as local component indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub(crate) struct Matrix {
    pub dim: u32,
    pub cells: Vec<(u32, u32)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct Tabulation {
    pub dict: Vec<Matrix>,
    /// Per side, `n * r + v`: matrix of `v`'s component and `v`'s index in it.
    pub slot: [Vec<(u32, u32)>; 2],
    /// Admissible for `[u⊕1, v⊖1]`, for the pairs cells refer to.
    pub pairwise: HashMap<(Vertex, Vertex), Entry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct Full {
    pub two: Level,
    /// Admissible for `[r, u]` per `n * r + e` for unmarked `e`.
    pub reduce: [Vec<Option<Entry>>; 2],
    /// Aligned with the second-level marks of each tree.
    pub chains: [Vec<Vec<Option<ChainTables>>>; 2],
    pub tab: Tabulation,
}

pub(crate) struct FullCounts {
    pub level2: usize,
    pub reduce: usize,
    pub chains: usize,
    pub matrices: usize,
    pub dict_cells: usize,
    pub pairwise: usize,
    pub index_words: usize,
}

impl Full {
    pub fn build(p: &impl Provider, one: &Level, l: u32, lp: u32, exec: Exec) -> Result<Full> {
        let ap = p.paths();
        let n = ap.n();
        let two = Level::build(p, lp, l, exec)?;
        let mut reduce: [Vec<Option<Entry>>; 2] = [Vec::new(), Vec::new()];
        let mut chains: [Vec<Vec<Option<ChainTables>>>; 2] = [Vec::new(), Vec::new()];
        for o in Side::BOTH {
            let rows: Vec<Result<Vec<Option<Entry>>>> =
                map_range(n, exec, |r| (0..n as Vertex).map(|e| reduce_entry(p, one, &two, o, r as Vertex, e)).collect());
            for row in rows {
                reduce[o.idx()].extend(row?);
            }
            let rows: Vec<Result<Vec<Option<ChainTables>>>> = map_range(n, exec, |r| {
                let r = r as Vertex;
                two.tree(o, r).mt.marks.iter().map(|&e| chain_tables(p, one, &two, o, r, e)).collect()
            });
            for row in rows {
                chains[o.idx()].push(row?);
            }
        }
        let tab = build_tabulation(p, &two, l, exec)?;
        Ok(Full { two, reduce, chains, tab })
    }

    pub fn counts(&self) -> FullCounts {
        let flat = |v: &[Vec<Option<ChainTables>>]| -> usize { v.iter().flatten().flatten().map(|c| c.ints.len() + c.exact.len()).sum() };
        FullCounts {
            level2: self.two.entries(),
            reduce: self.reduce.iter().flatten().flatten().count(),
            chains: flat(&self.chains[0]) + flat(&self.chains[1]),
            matrices: self.tab.dict.len(),
            dict_cells: self.tab.dict.iter().map(|m| m.cells.len()).sum(),
            pairwise: self.tab.pairwise.len(),
            index_words: self.two.index_words() + self.tab.slot.iter().map(Vec::len).sum::<usize>() + self.chains.iter().flatten().map(Vec::len).sum::<usize>(),
        }
    }

    fn chain(&self, o: Side, r: Vertex, e: Vertex, tr: &mut Trace) -> Result<&ChainTables> {
        tr.probe(1);
        let mt = &self.two.tree(o, r).mt;
        mt.local(e)
            .and_then(|k| self.chains[o.idx()][r as usize][k].as_ref())
            .ok_or_else(|| DsoError::Internal(format!("no chain tables for ({o:?}, {r}, {e})")))
    }

    /// `‖re⋄f‖` for `f` in the first-level component of `e` in the tree of `r`.
    #[allow(clippy::too_many_arguments)]
    pub fn reduce_short(&self, ap: &AllPairs, one: &Level, o: Side, r: Vertex, e: Vertex, f: Vertex, pf: u32, tr: &mut Trace) -> Result<Entry> {
        let n = ap.n();
        tr.probe(1);
        let c = one.tree(o, r).mt.comp[e as usize];
        if c == NONE {
            return Err(DsoError::Internal(format!("{e} is marked in the {o:?} tree of {r}")));
        }
        if c == r {
            tr.hit(Route::ReduceToRoot);
            return self.small(ap, one, o, r, e, f, pf, tr);
        }
        let mt2 = &self.two.tree(o, r).mt;
        tr.probe(2);
        if mt2.comp[f as usize] != NONE && mt2.comp[f as usize] == mt2.comp[e as usize] {
            return self.tabulated(ap, one, o, r, e, f, pf, tr);
        }
        tr.probe(1);
        if mt2.is_marked(e) {
            return self.marked(ap, one, o, r, e, c, f, pf, tr);
        }
        tr.hit(Route::ReduceUnmarked);
        tr.probe(4);
        let u = mt2.near[e as usize];
        if u == NONE {
            return Err(DsoError::Internal(format!("no second-level mark between {f} and {e}")));
        }
        let pc = ap.ohops(o, r, c);
        let via_root = if f == c { Entry::INF } else { join(o, ap.piece(o, r, c), self.small(ap, one, o, c, e, f, pf - pc, tr)?) };
        let via_u = if f == u { Entry::INF } else { join(o, self.marked(ap, one, o, r, u, c, f, pf, tr)?, ap.piece(o, u, e)) };
        let skip = self.reduce[o.idx()][r as usize * n + e as usize].ok_or_else(|| DsoError::Internal(format!("no [r, u] value for ({o:?}, {r}, {e})")))?;
        Ok(min_entry(&[via_root, via_u, skip]))
    }

    /// `e` second-level marked inside the first-level component rooted at `c`.
    #[allow(clippy::too_many_arguments)]
    fn marked(&self, ap: &AllPairs, one: &Level, o: Side, r: Vertex, e: Vertex, c: Vertex, f: Vertex, pf: u32, tr: &mut Trace) -> Result<Entry> {
        let mt2 = &self.two.tree(o, r).mt;
        let ct = self.chain(o, r, e, tr)?;
        tr.probe(4);
        let nc = mt2.near[c as usize];
        let base = if nc == NONE { 0 } else { mt2.cdepth(nc) };
        let p = mt2.cdepth(e) - base;
        let nf = mt2.near[f as usize];
        let a = if nf == NONE { 0 } else { mt2.cdepth(nf).saturating_sub(base) };
        if a + 1 == p {
            tr.hit(Route::MarkedExact);
            tr.probe(1);
            return exact_at(ct, pf);
        }
        if a + 1 > p {
            return Err(DsoError::Internal(format!("failure {f} beyond chain end {e}")));
        }
        tr.hit(Route::MarkedCases);
        let i = msb((p - a - 1) as u64);
        tr.probe(4);
        let w = mt2.cla(e, base + a + 1 + (1 << i));
        let u1 = mt2.cla(e, base + a + 1);
        let pc = ap.ohops(o, r, c);
        let root_piece = ap.piece(o, r, c);
        let small_e = if f == c { Entry::INF } else { join(o, root_piece, self.small(ap, one, o, c, e, f, pf - pc, tr)?) };
        tr.probe(1);
        let int_e = *ct.ints.get(i as usize).ok_or_else(|| DsoError::Internal(format!("chain interval {i} missing for {e}")))?;
        tr.probe(2);
        let exact_u1 = join(o, exact_at(self.chain(o, r, u1, tr)?, pf)?, ap.piece(o, u1, e));
        let we = ap.piece(o, w, e);
        let small_w = if f == c { Entry::INF } else { join(o, join(o, root_piece, self.small(ap, one, o, c, w, f, pf - pc, tr)?), we) };
        let wt = self.chain(o, r, w, tr)?;
        tr.probe(1);
        let int_w = join(o, *wt.ints.get(i as usize).ok_or_else(|| DsoError::Internal(format!("chain interval {i} missing for {w}")))?, we);
        Ok(min_entry(&[small_e, exact_u1, small_w, int_w, int_e]))
    }

    /// `‖re⋄f‖` in orientation `o` for `|re| ≤ L`.
    #[allow(clippy::too_many_arguments)]
    fn small(&self, ap: &AllPairs, one: &Level, o: Side, r: Vertex, e: Vertex, f: Vertex, pf: u32, tr: &mut Trace) -> Result<Entry> {
        tr.probe(1);
        let h = ap.ohops(o, r, e);
        let (s, t) = o.real(r, e);
        let spf = if o == Side::Fwd { pf } else { h - pf };
        match self.two.classify(ap, s, t, spf, tr) {
            Shortness::Target => {
                tr.hit(Route::SmallPathTab);
                self.tabulated(ap, one, Side::Fwd, s, t, f, spf, tr)
            }
            Shortness::Source => {
                tr.hit(Route::SmallPathTab);
                self.tabulated(ap, one, Side::Rev, t, s, f, h - spf, tr)
            }
            Shortness::No { x, y } => {
                tr.hit(Route::SmallPathMain);
                self.two.nonshort(ap, s, t, f, h, spf, x, y, tr)
            }
        }
    }

    /// `‖re⋄f‖` for `f` and `e` in one second-level component of the tree of `r`.
    #[allow(clippy::too_many_arguments)]
    pub fn tabulated(&self, ap: &AllPairs, one: &Level, o: Side, r: Vertex, e: Vertex, f: Vertex, pf: u32, tr: &mut Trace) -> Result<Entry> {
        tr.hit(Route::Tabulated);
        let n = ap.n();
        tr.probe(3);
        let slots = &self.tab.slot[o.idx()];
        let (m, le) = slots[r as usize * n + e as usize];
        let (mf, lf) = slots[r as usize * n + f as usize];
        if m == u32::MAX || m != mf {
            return Err(DsoError::Internal(format!("{e} and {f} are not in one component of the {o:?} tree of {r}")));
        }
        let mat = &self.tab.dict[m as usize];
        let (dd, cc) = mat.cells[(le * mat.dim + lf) as usize];
        match dd {
            OFF_PATH => Err(DsoError::Internal(format!("cell ({e}, {f}) in the {o:?} tree of {r} is off the path"))),
            UNREACHABLE => Ok(Entry::INF),
            FAR => {
                tr.hit(Route::TabulatedFar);
                tr.probe(2);
                let u = one.tree(o.flip(), e).mt.near[r as usize];
                if u == NONE {
                    return Err(DsoError::Internal(format!("no first-level mark near {r} on ({o:?}, {r}, {e})")));
                }
                let h = ap.ohops(o, r, e);
                Ok(join(o, ap.piece(o, r, u), one.iv(ap, o.flip(), e, u, h - pf, tr)?))
            }
            _ => {
                tr.probe(6);
                let h = ap.ohops(o, r, e);
                let dv = ap.oat(o, r, e, dd);
                let cv = ap.oat(o, r, e, h - cc);
                let real = o.real(dv, cv);
                let mid = *self.tab.pairwise.get(&real).ok_or_else(|| DsoError::Internal(format!("no pairwise value for {real:?}")))?;
                Ok(join(o, ap.piece(o, r, dv), join(o, mid, ap.piece(o, cv, e))))
            }
        }
    }
}

fn exact_at(ct: &ChainTables, pf: u32) -> Result<Entry> {
    pf.checked_sub(ct.start)
        .and_then(|k| ct.exact.get(k as usize))
        .copied()
        .ok_or_else(|| DsoError::Internal(format!("offset {pf} outside the exact chain window at {}", ct.start)))
}

fn reduce_entry(p: &impl Provider, one: &Level, two: &Level, o: Side, r: Vertex, e: Vertex) -> Result<Option<Entry>> {
    let ap = p.paths();
    let h = ap.ohops(o, r, e);
    if h == u32::MAX || h < 2 {
        return Ok(None);
    }
    let c = one.tree(o, r).mt.comp[e as usize];
    let mt2 = &two.tree(o, r).mt;
    if c == NONE || c == r || mt2.is_marked(e) {
        return Ok(None);
    }
    let u = mt2.near[e as usize];
    if u == NONE {
        return Ok(None);
    }
    let (pc, pu) = (ap.ohops(o, r, c), ap.ohops(o, r, u));
    if pu < pc {
        return Ok(None);
    }
    p.oadm(o, r, e, pc, pu).map(Some).map_err(|err| DsoError::Internal(format!("[r, u] on ({o:?}, {r}, {e}): {err}")))
}

fn chain_tables(p: &impl Provider, one: &Level, two: &Level, o: Side, r: Vertex, e: Vertex) -> Result<Option<ChainTables>> {
    let ap = p.paths();
    let c = one.tree(o, r).mt.comp[e as usize];
    if c == NONE || c == r {
        return Ok(None);
    }
    let mt2 = &two.tree(o, r).mt;
    let nc = mt2.near[c as usize];
    let base = if nc == NONE { 0 } else { mt2.cdepth(nc) };
    let pd = mt2.cdepth(e) - base;
    if pd == 0 {
        return Ok(None);
    }
    let u = |k: u32| mt2.cla(e, base + k);
    let off = |v: Vertex| ap.ohops(o, r, v);
    let pc = off(c);
    let h = off(e);
    let mut ints = Vec::new();
    for i in 0..pows_upto(pd.saturating_sub(1)) {
        let hi = off(u(pd - (1 << i)));
        ints.push(p.oadm(o, r, e, pc, hi).map_err(|err| DsoError::Internal(format!("chain on ({o:?}, {r}, {e}): {err}")))?);
    }
    let start = if pd == 1 { pc } else { off(u(pd - 1)) };
    let exact = (start..h).map(|k| p.orep(o, r, e, k)).collect();
    Ok(Some(ChainTables { ints, start, exact }))
}

/// Real offsets `(|sΔ|, |s∇|)` of a replacement path for `f = s ⊕ pf`
/// whose detour between them touches no other vertex of `st`.
fn divergence(p: &impl Provider, s: Vertex, t: Vertex, h: u32, pf: u32, d: Dist) -> (u32, u32) {
    let ap = p.paths();
    let mut c = pf + 1;
    let dc = loop {
        if c == h {
            break d;
        }
        let tc = ap.at(s, t, c);
        let v = p.replacement(s, tc, pf).dist;
        if dist_add(v, ap.dist(tc, t)) == d {
            break v;
        }
        c += 1;
    };
    let tc = ap.at(s, t, c);
    let mut k = pf - 1;
    while k > 0 {
        let sk = ap.at(s, t, k);
        if dist_add(ap.dist(s, sk), p.replacement(sk, tc, pf - k).dist) == dc {
            break;
        }
        k -= 1;
    }
    (k, c)
}

type RootTab = (Vec<Matrix>, Vec<(u32, u32)>, Vec<(Vertex, Vertex)>);

fn build_tabulation(p: &impl Provider, two: &Level, l: u32, exec: Exec) -> Result<Tabulation> {
    let ap = p.paths();
    let n = ap.n();
    let mut dict: Vec<Matrix> = Vec::new();
    let mut ids: HashMap<Matrix, u32> = HashMap::new();
    let mut slot: [Vec<(u32, u32)>; 2] = [Vec::new(), Vec::new()];
    let mut pairs: BTreeSet<(Vertex, Vertex)> = BTreeSet::new();
    for o in Side::BOTH {
        let per_root: Vec<RootTab> = map_range(n, exec, |r| {
            let r = r as Vertex;
            let tree = ap.tree(o, r);
            let mt = &two.tree(o, r).mt;
            let mut local = vec![(u32::MAX, u32::MAX); n];
            let mut members: HashMap<Vertex, Vec<Vertex>> = HashMap::new();
            for &v in &tree.order {
                let c = mt.comp[v as usize];
                if c != NONE {
                    let list = members.entry(c).or_default();
                    local[v as usize].1 = list.len() as u32;
                    list.push(v);
                }
            }
            let mut comps: Vec<(&Vertex, &Vec<Vertex>)> = members.iter().collect();
            comps.sort();
            let mut mats = Vec::new();
            let mut used = Vec::new();
            for (k, (_, list)) in comps.iter().enumerate() {
                let dim = list.len() as u32;
                let mut cells = vec![(OFF_PATH, OFF_PATH); (dim * dim) as usize];
                for (le, &e) in list.iter().enumerate() {
                    local[e as usize].0 = k as u32;
                    let h = tree.depth[e as usize];
                    for (lf, &f) in list.iter().enumerate() {
                        let pf = tree.depth[f as usize];
                        if f == r || pf >= h || tree.ancestor(e, pf) != f {
                            continue;
                        }
                        let cell = &mut cells[le * dim as usize + lf];
                        let d = p.orep(o, r, e, pf).dist;
                        if d == INF {
                            *cell = (UNREACHABLE, UNREACHABLE);
                            continue;
                        }
                        let (s, t) = o.real(r, e);
                        let spf = if o == Side::Fwd { pf } else { h - pf };
                        let (dk, ck) = divergence(p, s, t, h, spf, d);
                        let (dd, cc) = if o == Side::Fwd { (dk, h - ck) } else { (h - ck, dk) };
                        if dd > l {
                            *cell = (FAR, FAR);
                        } else {
                            *cell = (dd, cc);
                            used.push((ap.at(s, t, dk), ap.at(s, t, ck)));
                        }
                    }
                }
                mats.push(Matrix { dim, cells });
            }
            (mats, local, used)
        });
        for (mats, local, used) in per_root {
            let remap: Vec<u32> = mats
                .into_iter()
                .map(|m| {
                    *ids.entry(m.clone()).or_insert_with(|| {
                        dict.push(m);
                        dict.len() as u32 - 1
                    })
                })
                .collect();
            slot[o.idx()].extend(local.into_iter().map(|(k, i)| if k == u32::MAX { (u32::MAX, u32::MAX) } else { (remap[k as usize], i) }));
            pairs.extend(used);
        }
    }
    let pairs: Vec<(Vertex, Vertex)> = pairs.into_iter().collect();
    let vals: Vec<Result<Entry>> = map_range(pairs.len(), exec, |k| {
        let (u, v) = pairs[k];
        p.admissible(u, v, 1, ap.hops(u, v) - 1).map_err(|err| DsoError::Internal(format!("pairwise ({u}, {v}): {err}")))
    });
    let mut pairwise = HashMap::with_capacity(pairs.len());
    for (pr, v) in pairs.into_iter().zip(vals) {
        pairwise.insert(pr, v?);
    }
    Ok(Tabulation { dict, slot, pairwise })
}
