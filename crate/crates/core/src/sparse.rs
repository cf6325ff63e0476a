//! Sparse-table oracle: for every pair, replacement values at power-of-two
//! offsets from either end and admissible values for the dyadic intervals
//! between them. With a hop cap it serves only short paths.

use serde::{Deserialize, Serialize};

use crate::ancestor::msb;
use crate::error::{DsoError, Result};
use crate::graph::{Vertex, INF};
use crate::orient::{join, Side};
use crate::par::{map_range, Exec};
use crate::provider::{Provider, StoredInterval};
use crate::reference::{Entry, QueryAnswer};
use crate::trace::{Route, Trace};
use crate::tree::AllPairs;

/// Number of `i ≥ 0` with `2^i < m`.
#[inline]
fn n_pow(m: u32) -> u32 {
    if m <= 1 {
        0
    } else {
        msb(m as u64 - 1) + 1
    }
}

/// Number of `i ≥ 0` with `2^(i+1) < m`.
#[inline]
fn n_int(m: u32) -> u32 {
    if m <= 2 {
        0
    } else {
        msb(m as u64 - 1)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SparseTables {
    n: usize,
    cap: u32,
    start: Vec<u32>,
    cells: Vec<Entry>,
}

/// Layout per real pair `(s, t)` with `m = min(cap, |st|)`: forward and
/// reverse replacement values (`n_pow(m)` each), then forward and reverse
/// interval values (`n_int(m)` each).
pub fn build_sparse(p: &impl Provider, cap: u32, exec: Exec) -> Result<SparseTables> {
    let ap = p.paths();
    let n = ap.n();
    let rows: Vec<Result<Vec<Entry>>> = map_range(n, exec, |s| {
        let s = s as Vertex;
        let mut row = Vec::new();
        for t in 0..n as Vertex {
            let h = ap.hops(s, t);
            if h == u32::MAX || h < 2 {
                continue;
            }
            let m = cap.min(h);
            for o in Side::BOTH {
                let (r, e) = o.real(s, t);
                for i in 0..n_pow(m) {
                    row.push(p.orep(o, r, e, 1 << i));
                }
            }
            for o in Side::BOTH {
                let (r, e) = o.real(s, t);
                for i in 0..n_int(m) {
                    let e = p.oadm(o, r, e, 1 << i, 2 << i).map_err(|err| DsoError::Internal(format!("interval {i} on ({s}, {t}): {err}")))?;
                    row.push(e);
                }
            }
        }
        Ok(row)
    });
    let mut start = vec![0u32; n * n + 1];
    let mut cells = Vec::new();
    for (s, row) in rows.into_iter().enumerate() {
        let row = row?;
        let mut at = cells.len() as u32;
        for t in 0..n {
            start[s * n + t] = at;
            let h = ap.hops(s as Vertex, t as Vertex);
            if h != u32::MAX && h >= 2 {
                let m = cap.min(h);
                at += 2 * (n_pow(m) + n_int(m));
            }
        }
        cells.extend(row);
        debug_assert_eq!(cells.len() as u32, at);
    }
    start[n * n] = cells.len() as u32;
    Ok(SparseTables { n, cap, start, cells })
}

impl SparseTables {
    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Stored distance entries.
    pub fn entries(&self) -> usize {
        self.cells.len()
    }

    pub fn cells_mut(&mut self) -> &mut [Entry] {
        &mut self.cells
    }

    /// Every stored interval value with its interval.
    pub fn intervals(&self, ap: &AllPairs) -> Vec<StoredInterval> {
        let mut out = Vec::new();
        for s in 0..self.n as Vertex {
            for t in 0..self.n as Vertex {
                let h = ap.hops(s, t);
                if h == u32::MAX || h < 2 {
                    continue;
                }
                let m = self.cap.min(h);
                let base = self.start[s as usize * self.n + t as usize] + 2 * n_pow(m);
                for o in Side::BOTH {
                    let (r, e) = o.real(s, t);
                    for i in 0..n_int(m) {
                        let v = self.cells[(base + o.idx() as u32 * n_int(m) + i) as usize].dist;
                        out.push(StoredInterval::oriented(ap, o, r, e, 1 << i, 2 << i, v));
                    }
                }
            }
        }
        out
    }

    /// `‖re⋄(r ⊕ 2^i)‖` in orientation `o` (requires `2^i < min(cap, |re|)`).
    /// The pair's hop count sits beside its offset, so this is one probe.
    #[inline]
    pub fn rep_pow(&self, ap: &AllPairs, o: Side, r: Vertex, e: Vertex, i: u32, tr: &mut Trace) -> Entry {
        tr.probe(1);
        let (s, t) = o.real(r, e);
        let m = self.cap.min(ap.hops(s, t));
        debug_assert!(i < n_pow(m));
        self.cells[(self.start[s as usize * self.n + t as usize] + o.idx() as u32 * n_pow(m) + i) as usize]
    }

    /// Admissible value for `[r ⊕ 2^i, r ⊕ 2^(i+1)]` in orientation `o`.
    #[inline]
    pub fn int_pow(&self, ap: &AllPairs, o: Side, r: Vertex, e: Vertex, i: u32, tr: &mut Trace) -> Entry {
        tr.probe(1);
        let (s, t) = o.real(r, e);
        let m = self.cap.min(ap.hops(s, t));
        debug_assert!(i < n_int(m));
        let base = self.start[s as usize * self.n + t as usize] + 2 * n_pow(m);
        self.cells[(base + o.idx() as u32 * n_int(m) + i) as usize]
    }

    /// `‖st⋄f‖` for `f = s ⊕ pf`, `0 < pf < h = |st| ≤ cap`.
    pub fn answer(&self, ap: &AllPairs, s: Vertex, t: Vertex, h: u32, pf: u32, tr: &mut Trace) -> Entry {
        let (o, r, e, d1, d2) = if pf <= h - pf { (Side::Fwd, s, t, pf, h - pf) } else { (Side::Rev, t, s, h - pf, pf) };
        if d1.is_power_of_two() {
            tr.hit(Route::BasePow2);
            return self.rep_pow(ap, o, r, e, msb(d1 as u64), tr);
        }
        tr.hit(Route::BaseCases);
        let i = msb(d1 as u64);
        let j = msb(d2 as u64 - 1);
        tr.probe(2);
        let g = ap.oat(o, r, e, d1 - (1 << i));
        let z = ap.oat(o, r, e, d1 + (1 << j));
        tr.probe(4);
        let via_g = join(o, ap.piece(o, r, g), self.rep_pow(ap, o, g, e, i, tr));
        let via_z = join(o, self.rep_pow(ap, o.flip(), z, r, j, tr), ap.piece(o, z, e));
        let skip = self.int_pow(ap, o, r, e, i, tr);
        min_entry(&[via_g, via_z, skip])
    }
}

/// Smallest distance; earliest candidate on ties.
#[inline]
pub(crate) fn min_entry(c: &[Entry]) -> Entry {
    let mut best = Entry::INF;
    for &e in c {
        if e.dist < best.dist {
            best = e;
        }
    }
    best
}

/// Outcome of the checks every query starts with.
pub(crate) enum Prelude {
    Done(QueryAnswer, Entry),
    OnPath { h: u32, pf: u32 },
}

pub(crate) fn prelude(ap: &AllPairs, s: Vertex, t: Vertex, f: Vertex, tr: &mut Trace) -> Prelude {
    let n = ap.n() as Vertex;
    if s >= n || t >= n || f >= n {
        return Prelude::Done(QueryAnswer::Invalid, Entry::INF);
    }
    tr.hit(Route::Trivial);
    if s == t {
        return Prelude::Done(QueryAnswer::Finite(0), Entry::new(0, crate::graph::NONE));
    }
    if f == s || f == t {
        return Prelude::Done(QueryAnswer::Invalid, Entry::INF);
    }
    tr.probe(3);
    let h = ap.hops(s, t);
    if h == u32::MAX {
        return Prelude::Done(QueryAnswer::Unreachable, Entry::INF);
    }
    let pf = ap.hops(s, f);
    if pf >= h || ap.at(s, t, pf) != f {
        tr.hit(Route::OffPath);
        tr.probe(2);
        let e = ap.piece(Side::Fwd, s, t);
        return Prelude::Done(QueryAnswer::from_dist(e.dist), e);
    }
    Prelude::OnPath { h, pf }
}

/// Any oracle answering single-failure queries.
pub trait Oracle: Sync {
    fn paths(&self) -> &AllPairs;

    /// Answer plus an entry whose `next` is the first hop of a path of that
    /// length (not guaranteed to avoid `f` when values tie).
    fn query_traced(&self, s: Vertex, t: Vertex, f: Vertex, tr: &mut Trace) -> Result<(QueryAnswer, Entry)>;

    fn query(&self, s: Vertex, t: Vertex, f: Vertex) -> Result<QueryAnswer> {
        self.query_traced(s, t, f, &mut Trace::default()).map(|(a, _)| a)
    }
}

/// The uncapped sparse-table oracle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaselineOracle {
    pub ap: AllPairs,
    pub tables: SparseTables,
}

impl BaselineOracle {
    pub fn build(p: &impl Provider, exec: Exec) -> Result<Self> {
        let ap = p.paths().clone();
        let tables = build_sparse(p, ap.n() as u32, exec)?;
        Ok(Self { ap, tables })
    }
}

/// Sparse-table query; `|st|` must not exceed the table's cap.
pub fn query_baseline(ap: &AllPairs, tables: &SparseTables, s: Vertex, t: Vertex, f: Vertex, tr: &mut Trace) -> Result<(QueryAnswer, Entry)> {
    match prelude(ap, s, t, f, tr) {
        Prelude::Done(a, e) => Ok((a, e)),
        Prelude::OnPath { h, pf } => {
            if h > tables.cap {
                return Err(DsoError::Contract(format!("|st| = {h} exceeds table cap {}", tables.cap)));
            }
            let e = tables.answer(ap, s, t, h, pf, tr);
            Ok((QueryAnswer::from_dist(e.dist), if e.dist == INF { Entry::INF } else { e }))
        }
    }
}

impl Oracle for BaselineOracle {
    fn paths(&self) -> &AllPairs {
        &self.ap
    }

    fn query_traced(&self, s: Vertex, t: Vertex, f: Vertex, tr: &mut Trace) -> Result<(QueryAnswer, Entry)> {
        query_baseline(&self.ap, &self.tables, s, t, f, tr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightedDigraph;
    use crate::provider::NaiveProvider;
    use crate::reference::ReplacementTable;
    use crate::tree::tests::{g4, g5};

    #[test]
    fn counts() {
        assert_eq!((n_pow(1), n_pow(2), n_pow(3), n_pow(4), n_pow(5)), (0, 1, 2, 2, 3));
        assert_eq!((n_int(2), n_int(3), n_int(4), n_int(5)), (0, 1, 1, 2));
    }

    #[test]
    fn small_examples() {
        let g = g5();
        let ap = AllPairs::new(&g, Exec::Sequential);
        let tab = ReplacementTable::build(&g, &ap, Exec::Sequential);
        let p = NaiveProvider::new(&g, &ap, &tab);
        let o = BaselineOracle::build(&p, Exec::Sequential).unwrap();
        let mut tr = Trace::default();
        assert_eq!(o.tables.rep_pow(&ap, Side::Fwd, 0, 4, 1, &mut tr).dist, 10);
        assert_eq!(o.tables.int_pow(&ap, Side::Fwd, 0, 4, 0, &mut tr).dist, 10);
        assert_eq!(o.query(0, 4, 2).unwrap(), QueryAnswer::Finite(10));
        assert_eq!(o.query(0, 4, 3).unwrap(), QueryAnswer::Finite(10));

        let g = g4();
        let ap = AllPairs::new(&g, Exec::Sequential);
        let tab = ReplacementTable::build(&g, &ap, Exec::Sequential);
        let p = NaiveProvider::new(&g, &ap, &tab);
        let o = BaselineOracle::build(&p, Exec::Sequential).unwrap();
        assert_eq!(o.query(0, 3, 1).unwrap(), QueryAnswer::Finite(6));
        assert_eq!(o.query(0, 3, 2).unwrap(), QueryAnswer::Finite(6));
        assert_eq!(o.query(0, 1, 3).unwrap(), QueryAnswer::Finite(1));
        assert_eq!(o.query(0, 3, 0).unwrap(), QueryAnswer::Invalid);
        assert_eq!(o.query(2, 2, 0).unwrap(), QueryAnswer::Finite(0));
        // Adjacent pairs store nothing.
        let two = WeightedDigraph::from_edges(2, [(0, 1, 3)]).unwrap();
        let ap = AllPairs::new(&two, Exec::Sequential);
        let tab = ReplacementTable::build(&two, &ap, Exec::Sequential);
        let p = NaiveProvider::new(&two, &ap, &tab);
        assert_eq!(build_sparse(&p, 2, Exec::Sequential).unwrap().entries(), 0);
    }

    #[test]
    fn random_graphs_match_reference() {
        for seed in 0..6 {
            let g = crate::gen::erdos_renyi(18, [0.1, 0.3][seed as usize % 2], 9, seed);
            let ap = AllPairs::new(&g, Exec::Sequential);
            let tab = ReplacementTable::build(&g, &ap, Exec::Sequential);
            let p = NaiveProvider::new(&g, &ap, &tab);
            let o = BaselineOracle::build(&p, Exec::Sequential).unwrap();
            for s in 0..18 {
                for t in 0..18 {
                    for f in 0..18 {
                        assert_eq!(o.query(s, t, f).unwrap(), tab.answer(&ap, s, t, f), "({s},{t},{f}) seed {seed}");
                    }
                }
            }
        }
        let g = crate::gen::path_with_chords(40, 30, 2);
        let ap = AllPairs::new(&g, Exec::Sequential);
        let tab = ReplacementTable::build(&g, &ap, Exec::Sequential);
        let p = NaiveProvider::new(&g, &ap, &tab);
        let o = BaselineOracle::build(&p, Exec::Sequential).unwrap();
        for s in 0..40 {
            for t in 0..40 {
                for f in 0..40 {
                    let mut tr = Trace::default();
                    let (a, _) = o.query_traced(s, t, f, &mut tr).unwrap();
                    assert_eq!(a, tab.answer(&ap, s, t, f), "({s},{t},{f})");
                    assert!(tr.probes <= 12);
                }
            }
        }
    }
}
