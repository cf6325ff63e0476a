//! The compact oracle: marked-set tables for failures far from both
//! endpoints, plus either capped sparse tables (`loglog`) or a second marked
//! level with tabulation (`full`) for failures close to one endpoint.

mod audit;
mod full;
mod level;
mod marked;

use serde::{Deserialize, Serialize};

use crate::ancestor::msb;
use crate::error::{DsoError, Result};
use crate::graph::{Vertex, INF};
use crate::orient::{join, Side};
use crate::par::Exec;
use crate::provider::Provider;
use crate::reference::{Entry, QueryAnswer};
use crate::sparse::{build_sparse, min_entry, prelude, Oracle, Prelude, SparseTables};
use crate::trace::{Route, Trace};
use crate::tree::AllPairs;

use full::Full;
use level::{Level, Shortness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Loglog,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub l: u32,
    pub lp: u32,
    pub mode: Mode,
}

impl Params {
    /// `L = ⌈log₂²n⌉` and `L′ = ⌈(log₂log₂n)²⌉`, each at least 2, `L′ ≤ L`.
    pub fn defaults(n: usize, mode: Mode) -> Params {
        let lg = (n.max(2) as f64).log2();
        let l = (lg * lg).ceil().max(2.0) as u32;
        let lp = (lg.log2().max(0.0).powi(2)).ceil().max(2.0) as u32;
        Params { l, lp: lp.min(l), mode }
    }

    /// Defaults with optional overrides; rejects `L′ > L` and values below 2.
    pub fn new(n: usize, mode: Mode, l: Option<u32>, lp: Option<u32>) -> Result<Params> {
        let d = Params::defaults(n, mode);
        let l = l.unwrap_or(d.l);
        let lp = lp.unwrap_or(d.lp.min(l));
        let p = Params { l, lp, mode };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lp < 2 || self.l < 2 {
            return Err(DsoError::Contract(format!("L = {} and L' = {} must both be at least 2", self.l, self.lp)));
        }
        if self.lp > self.l {
            return Err(DsoError::Contract(format!("L' = {} exceeds L = {}", self.lp, self.l)));
        }
        Ok(())
    }
}

/// Stored distance entries per structure, and index sizes in words.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryCounts {
    pub level1: usize,
    pub loglog: usize,
    pub level2: usize,
    pub reduce: usize,
    pub chains: usize,
    pub matrices: usize,
    pub dict_cells: usize,
    pub pairwise: usize,
    /// Marked-set addresses, contracted trees and tabulation slots.
    pub index_words: usize,
    /// Level-ancestor tables of the shortest-path trees.
    pub la_words: usize,
}

impl EntryCounts {
    /// Distance entries plus tabulation cells; excludes index words.
    pub fn total(&self) -> usize {
        self.level1 + self.loglog + self.level2 + self.reduce + self.chains + self.dict_cells + self.pairwise
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompactOracle {
    pub params: Params,
    pub ap: AllPairs,
    one: Level,
    capped: Option<SparseTables>,
    full: Option<Full>,
}

pub fn build_compact(p: &impl Provider, params: Params, exec: Exec) -> Result<CompactOracle> {
    params.validate()?;
    let covered = params.mode == Mode::Loglog && p.paths().max_hops() <= 4 * params.l;
    let one = if covered { Level::empty(params.l) } else { Level::build(p, params.l, u32::MAX, exec)? };
    let (capped, full) = match params.mode {
        Mode::Loglog => (Some(build_sparse(p, 4 * params.l, exec)?), None),
        Mode::Full => (None, Some(Full::build(p, &one, params.l, params.lp, exec)?)),
    };
    Ok(CompactOracle { params, ap: p.paths().clone(), one, capped, full })
}

impl CompactOracle {
    pub fn counts(&self) -> EntryCounts {
        let mut c = EntryCounts {
            level1: self.one.entries(),
            loglog: self.capped.as_ref().map_or(0, SparseTables::entries),
            index_words: self.one.index_words(),
            la_words: self.ap.la_words(),
            ..Default::default()
        };
        if let Some(f) = &self.full {
            let fc = f.counts();
            c.level2 = fc.level2;
            c.reduce = fc.reduce;
            c.chains = fc.chains;
            c.matrices = fc.matrices;
            c.dict_cells = fc.dict_cells;
            c.pairwise = fc.pairwise;
            c.index_words += fc.index_words;
        }
        c
    }

    /// Replaces every stored exact window value by `f(value)`; used to check
    /// that verification notices corrupted tables.
    pub fn corrupt_windows(&mut self, f: impl Fn(Entry) -> Entry) {
        for lt in self.one.trees.iter_mut().flatten() {
            for tb in &mut lt.tabs {
                for e in tb.head.iter_mut().chain(tb.tail.iter_mut()) {
                    *e = f(*e);
                }
            }
        }
        if let Some(t) = &mut self.capped {
            for e in t.cells_mut() {
                *e = f(*e);
            }
        }
    }

    fn short_loglog(&self, s: Vertex, t: Vertex, h: u32, pf: u32, target: bool, tr: &mut Trace) -> Result<Entry> {
        let ap = &self.ap;
        let tables = self.capped.as_ref().ok_or_else(|| DsoError::Internal("loglog tables missing".into()))?;
        let l = self.params.l;
        if h <= 4 * l {
            tr.hit(Route::LoglogBaseline);
            return Ok(tables.answer(ap, s, t, h, pf, tr));
        }
        let (o, r, e, d1) = if target { (Side::Rev, t, s, h - pf) } else { (Side::Fwd, s, t, pf) };
        if d1 >= 2 * l {
            return Err(DsoError::Internal(format!("short failure at distance {d1} from the near end")));
        }
        let i = msb(d1 as u64);
        if d1.is_power_of_two() {
            tr.hit(Route::LoglogPow2);
            return Ok(tables.rep_pow(ap, o, r, e, i, tr));
        }
        tr.hit(Route::LoglogCases);
        tr.probe(4);
        let g = ap.oat(o, r, e, d1 - (1 << i));
        let z = ap.oat(o, r, e, 2 * l);
        let via_g = join(o, ap.piece(o, r, g), tables.rep_pow(ap, o, g, e, i, tr));
        let (zs, zt) = o.real(r, z);
        let zpf = if o == Side::Fwd { d1 } else { 2 * l - d1 };
        tr.probe(2);
        let via_z = join(o, tables.answer(ap, zs, zt, 2 * l, zpf, tr), ap.piece(o, z, e));
        let skip = tables.int_pow(ap, o, r, e, i, tr);
        Ok(min_entry(&[via_g, via_z, skip]))
    }
}

impl Oracle for CompactOracle {
    fn paths(&self) -> &AllPairs {
        &self.ap
    }

    fn query_traced(&self, s: Vertex, t: Vertex, f: Vertex, tr: &mut Trace) -> Result<(QueryAnswer, Entry)> {
        let (h, pf) = match prelude(&self.ap, s, t, f, tr) {
            Prelude::Done(a, e) => return Ok((a, e)),
            Prelude::OnPath { h, pf } => (h, pf),
        };
        let ap = &self.ap;
        if self.params.mode == Mode::Loglog && h <= 4 * self.params.l {
            let e = self.short_loglog(s, t, h, pf, false, tr)?;
            let e = if e.dist == INF { Entry::INF } else { e };
            return Ok((QueryAnswer::from_dist(e.dist), e));
        }
        let shortness = self.one.classify(ap, s, t, pf, tr);
        let e = match (shortness, self.params.mode) {
            (Shortness::No { x, y }, _) => self.one.nonshort(ap, s, t, f, h, pf, x, y, tr)?,
            (sh, Mode::Loglog) => self.short_loglog(s, t, h, pf, matches!(sh, Shortness::Target), tr)?,
            (sh, Mode::Full) => {
                let full = self.full.as_ref().ok_or_else(|| DsoError::Internal("full-mode tables missing".into()))?;
                match sh {
                    Shortness::Target => full.reduce_short(ap, &self.one, Side::Fwd, s, t, f, pf, tr)?,
                    _ => full.reduce_short(ap, &self.one, Side::Rev, t, s, f, h - pf, tr)?,
                }
            }
        };
        let e = if e.dist == INF { Entry::INF } else { e };
        Ok((QueryAnswer::from_dist(e.dist), e))
    }
}
