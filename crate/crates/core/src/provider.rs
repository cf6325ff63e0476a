//! Sources of replacement values for the table builders.
//!
//! A provider answers exact single-failure values `‖st⋄f‖` and, for an
//! interval of `st`, some admissible value `F` with
//! `‖st⋄[u,v]‖ ≥ F ≥ max_{f∈[u,v]} ‖st⋄f‖`.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use crate::error::{DsoError, Result};
use crate::graph::{Dist, Vertex, WeightedDigraph};
use crate::orient::Side;
use crate::reference::{shortest_path_avoiding, Entry, ReplacementTable};
use crate::tree::AllPairs;

pub trait Provider: Sync {
    fn paths(&self) -> &AllPairs;

    /// `‖st⋄(s⊕p)‖` for `0 < p < |st|`.
    fn replacement(&self, s: Vertex, t: Vertex, p: u32) -> Entry;

    /// Admissible value for the subpath of `st` at offsets `[lo, hi]`,
    /// `0 < lo ≤ hi < |st|`.
    fn admissible(&self, s: Vertex, t: Vertex, lo: u32, hi: u32) -> Result<Entry>;

    /// Single-failure probes served so far.
    fn probes(&self) -> u64;

    /// Oriented [`Provider::replacement`]: failure at oriented offset `p`
    /// from root `r` on the path to `e`.
    fn orep(&self, o: Side, r: Vertex, e: Vertex, p: u32) -> Entry {
        match o {
            Side::Fwd => self.replacement(r, e, p),
            Side::Rev => self.replacement(e, r, self.paths().hops(e, r) - p),
        }
    }

    /// Oriented [`Provider::admissible`] over oriented offsets `[lo, hi]`.
    fn oadm(&self, o: Side, r: Vertex, e: Vertex, lo: u32, hi: u32) -> Result<Entry> {
        match o {
            Side::Fwd => self.admissible(r, e, lo, hi),
            Side::Rev => {
                let h = self.paths().hops(e, r);
                self.admissible(e, r, h - hi, h - lo)
            }
        }
    }
}

/// A stored admissible value with the real interval `[lo, hi]` of `st` it
/// was built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoredInterval {
    pub s: Vertex,
    pub t: Vertex,
    pub lo: u32,
    pub hi: u32,
    pub value: Dist,
}

impl StoredInterval {
    /// From oriented offsets on `(o, r, e)`.
    pub fn oriented(ap: &AllPairs, o: Side, r: Vertex, e: Vertex, lo: u32, hi: u32, value: Dist) -> Self {
        let (s, t) = o.real(r, e);
        match o {
            Side::Fwd => Self { s, t, lo, hi, value },
            Side::Rev => {
                let h = ap.hops(s, t);
                Self { s, t, lo: h - hi, hi: h - lo, value }
            }
        }
    }
}

pub(crate) fn check_interval(ap: &AllPairs, s: Vertex, t: Vertex, lo: u32, hi: u32) -> Result<u32> {
    let h = ap.hops(s, t);
    if h == u32::MAX || lo == 0 || lo > hi || hi >= h {
        return Err(DsoError::Contract(format!("offsets [{lo}, {hi}] are not inside {s}->{t}")));
    }
    Ok(h)
}

/// Exact values from a [`ReplacementTable`]; intervals by Dijkstra with the
/// whole interval removed, memoized.
pub struct NaiveProvider<'a> {
    g: &'a WeightedDigraph,
    ap: &'a AllPairs,
    table: &'a ReplacementTable,
    probes: AtomicU64,
    memo: Mutex<HashMap<(Vertex, Vertex, u32, u32), Entry>>,
}

impl<'a> NaiveProvider<'a> {
    pub fn new(g: &'a WeightedDigraph, ap: &'a AllPairs, table: &'a ReplacementTable) -> Self {
        Self { g, ap, table, probes: AtomicU64::new(0), memo: Mutex::new(HashMap::new()) }
    }
}

impl Provider for NaiveProvider<'_> {
    fn paths(&self) -> &AllPairs {
        self.ap
    }

    fn replacement(&self, s: Vertex, t: Vertex, p: u32) -> Entry {
        self.probes.fetch_add(1, Ordering::Relaxed);
        self.table.at(s, t, p)
    }

    fn admissible(&self, s: Vertex, t: Vertex, lo: u32, hi: u32) -> Result<Entry> {
        check_interval(self.ap, s, t, lo, hi)?;
        if lo == hi {
            return Ok(self.replacement(s, t, lo));
        }
        if let Some(&e) = self.memo.lock().unwrap().get(&(s, t, lo, hi)) {
            return Ok(e);
        }
        let mut banned = vec![false; self.g.n()];
        for p in lo..=hi {
            banned[self.ap.at(s, t, p) as usize] = true;
        }
        let e = match shortest_path_avoiding(self.g, s, t, &banned) {
            Some((d, path)) => Entry::new(d, path[1]),
            None => Entry::INF,
        };
        self.memo.lock().unwrap().insert((s, t, lo, hi), e);
        Ok(e)
    }

    fn probes(&self) -> u64 {
        self.probes.load(Ordering::Relaxed)
    }
}
