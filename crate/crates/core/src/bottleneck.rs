//! Bottleneck search: for an interval `[u, v]` of `st`, find a vertex `f` in
//! it maximizing `‖st⋄f‖` using `O(log n)` single-failure probes.
//!
//! For each scale `i ≥ 1` and target `t` the reverse tree of `t` is
//! partitioned with length `2^i`; each marked `a` keeps the values
//! `‖at⋄(a⊕c)‖`, `1 ≤ c ≤ 2^{i+2}`, with an argmax range-query table. The
//! mirrored arrays live on the forward trees. A query anchors each half of the
//! interval at a nearby marked vertex and binary-searches the upper bound
//! `MTC(f) = min(‖sa‖ + ‖at⋄f‖, ‖sb⋄f‖ + ‖bt‖)`.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};
use std::sync::Mutex;

use crate::ancestor::msb;
use crate::error::{DsoError, Result};
use crate::graph::{dist_add, Dist, Vertex, WeightedDigraph, INF, NONE};
use crate::orient::Side;
use crate::par::{map_range, Exec};
use crate::partition::{nearest_marked, partition_for_length};
use crate::provider::{check_interval, NaiveProvider, Provider};
use crate::reference::{Entry, ReplacementTable};
use crate::tree::AllPairs;

/// Argmax sparse table; ties go to the smaller index.
#[derive(Debug, Clone)]
pub struct ArgMaxRmq {
    vals: Vec<Dist>,
    levels: Vec<Vec<u16>>,
}

impl ArgMaxRmq {
    pub fn new(vals: Vec<Dist>) -> Self {
        assert!(vals.len() <= u16::MAX as usize + 1);
        let mut levels: Vec<Vec<u16>> = Vec::new();
        let mut w = 1;
        while 2 * w <= vals.len() {
            let prev: Vec<u16> = match levels.last() {
                Some(l) => l.clone(),
                None => (0..vals.len() as u32).map(|x| x as u16).collect(),
            };
            let lvl = (0..=vals.len() - 2 * w).map(|j| pick(&vals, prev[j], prev[j + w])).collect();
            levels.push(lvl);
            w *= 2;
        }
        Self { vals, levels }
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn value(&self, i: usize) -> Dist {
        self.vals[i]
    }

    /// Index of the maximum on `[l, r]`.
    pub fn argmax(&self, l: usize, r: usize) -> usize {
        assert!(l <= r && r < self.vals.len());
        let span = (r - l + 1) as u64;
        if span == 1 {
            return l;
        }
        let k = msb(span) as usize;
        let lvl = &self.levels[k - 1];
        pick(&self.vals, lvl[l], lvl[r + 1 - (1 << k)]) as usize
    }

    fn words(&self) -> usize {
        self.vals.len() * 2 + self.levels.iter().map(|l| l.len().div_ceil(4)).sum::<usize>()
    }
}

#[inline]
fn pick(vals: &[Dist], a: u16, b: u16) -> u16 {
    let (x, y) = if a <= b { (a, b) } else { (b, a) };
    if vals[y as usize] > vals[x as usize] {
        y
    } else {
        x
    }
}

#[derive(Debug, Clone)]
struct TreeMarks {
    near: Vec<Vertex>,
    arrays: Vec<(Vertex, ArgMaxRmq)>,
}

impl TreeMarks {
    fn array(&self, a: Vertex) -> Option<&ArgMaxRmq> {
        self.arrays.binary_search_by_key(&a, |x| x.0).ok().map(|i| &self.arrays[i].1)
    }
}

/// Per scale and side, the marked sets and arrays, indexed by the tree root.
#[derive(Debug, Clone)]
pub struct BottleneckIndex {
    n: usize,
    scales: Vec<[Vec<TreeMarks>; 2]>,
    build_probes: u64,
}

/// One oriented search: root `r`, end `e`, anchors `a` (at oriented offset
/// `pa`) and `b` (at `pb`), searched range `[x, y]` of oriented offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FindBotInstance {
    pub o: Side,
    pub r: Vertex,
    pub e: Vertex,
    pub a: Vertex,
    pub pa: u32,
    pub b: Vertex,
    pub pb: u32,
    pub x: u32,
    pub y: u32,
    scale: u32,
}

/// Result of a bottleneck query: real offset of the maximizer, its value
/// and the deepest FindBot recursion used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bottleneck {
    pub offset: u32,
    pub dist: Dist,
    pub depth: u32,
}

/// Builds every scale's partitions and arrays, reading single-failure values
/// from `p`.
pub fn build_bottleneck_index(p: &impl Provider, exec: Exec) -> BottleneckIndex {
    let ap = p.paths();
    let n = ap.n();
    let before = p.probes();
    let max_h = ap.max_hops();
    let mut scales = Vec::new();
    let mut i = 1;
    while max_h > 0 && (1u64 << (i + 1)) <= max_h as u64 {
        let side = |o: Side| {
            map_range(n, exec, |e| {
                let e = e as Vertex;
                let tree = ap.tree(o.flip(), e);
                let ms = partition_for_length(tree, 1 << i);
                let near = nearest_marked(tree, &ms);
                let arrays = ms
                    .marked
                    .iter()
                    .map(|&a| {
                        let h = ap.ohops(o, a, e);
                        let len = (1u32 << (i + 2)).min(h.saturating_sub(1));
                        (a, ArgMaxRmq::new((1..=len).map(|c| p.orep(o, a, e, c).dist).collect()))
                    })
                    .collect();
                TreeMarks { near, arrays }
            })
        };
        scales.push([side(Side::Fwd), side(Side::Rev)]);
        i += 1;
    }
    BottleneckIndex { n, scales, build_probes: p.probes() - before }
}

impl BottleneckIndex {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scales(&self) -> usize {
        self.scales.len()
    }

    /// Provider probes spent filling the arrays.
    pub fn build_probes(&self) -> u64 {
        self.build_probes
    }

    /// Stored array cells over all scales.
    pub fn cells(&self) -> usize {
        self.all_marks().map(|m| m.arrays.iter().map(|(_, a)| a.len()).sum::<usize>()).sum()
    }

    /// Machine words including near tables and range-query levels.
    pub fn words(&self) -> usize {
        self.all_marks().map(|m| m.near.len().div_ceil(2) + m.arrays.iter().map(|(_, a)| a.words() + 1).sum::<usize>()).sum()
    }

    fn all_marks(&self) -> impl Iterator<Item = &TreeMarks> {
        self.scales.iter().flat_map(|s| s.iter().flatten())
    }

    /// The two FindBot searches covering real offsets `[lo, hi]` of `st`,
    /// or `None` when the interval is short enough for a linear scan.
    pub fn instances(&self, ap: &AllPairs, s: Vertex, t: Vertex, lo: u32, hi: u32) -> Result<Option<[FindBotInstance; 2]>> {
        let h = check_interval(ap, s, t, lo, hi)?;
        let len = hi - lo;
        if len < 4 {
            return Ok(None);
        }
        let i = msb(len as u64) - 1;
        let make = |o: Side, r: Vertex, e: Vertex, olo: u32, ohi: u32| -> Result<FindBotInstance> {
            let tm =
                self.scales.get(i as usize - 1).map(|sc| &sc[o.idx()][e as usize]).ok_or_else(|| DsoError::Internal(format!("no bottleneck scale {i}")))?;
            let x0 = ap.oat(o, r, e, olo);
            let a = tm.near[x0 as usize];
            if a == NONE {
                return Err(DsoError::Internal(format!("no marked anchor above {x0} at scale {i}")));
            }
            let pa = ap.ohops(o, r, a);
            if pa < olo || pa > ohi {
                return Err(DsoError::Internal(format!("anchor {a} outside the searched range")));
            }
            Ok(FindBotInstance { o, r, e, a, pa, b: ap.oat(o, r, e, ohi), pb: ohi, x: pa, y: ohi, scale: i })
        };
        Ok(Some([make(Side::Fwd, s, t, lo, hi)?, make(Side::Rev, t, s, h - hi, h - lo)?]))
    }

    /// Argmax of `MTC` over the instance range (oriented offset) and the
    /// recursion depth reached.
    pub fn find_bot(&self, p: &impl Provider, inst: &FindBotInstance) -> Result<(u32, u32)> {
        let tm = &self.scales[inst.scale as usize - 1][inst.o.idx()][inst.e as usize];
        let arr = tm.array(inst.a).ok_or_else(|| DsoError::Internal(format!("{} has no bottleneck array", inst.a)))?;
        self.find_bot_rec(p, inst, arr, inst.x, inst.y, 1)
    }

    fn find_bot_rec(&self, p: &impl Provider, inst: &FindBotInstance, arr: &ArgMaxRmq, x: u32, y: u32, depth: u32) -> Result<(u32, u32)> {
        let ap = p.paths();
        let mtc = |f: u32| mtc_with(ap, p, inst, f, Some(arr));
        if y - x <= 2 {
            let mut best = (x, mtc(x));
            for f in x + 1..=y {
                let v = mtc(f);
                if v > best.1 {
                    best = (f, v);
                }
            }
            return Ok((best.0, depth));
        }
        let q = (x + y) / 2;
        let (cl, cr) = ((q - inst.pa) as usize, (y - inst.pa) as usize);
        if cr > arr.len() {
            return Err(DsoError::Internal(format!("bottleneck array of {} too short", inst.a)));
        }
        let bi = arr.argmax(cl - 1, cr - 1);
        let bstar = inst.pa + bi as u32 + 1;
        let left = dist_add(ap.odist(inst.o, inst.r, inst.a), arr.value(bi));
        let right = tail_term(ap, p, inst, bstar);
        if left <= right {
            let (w, d) = self.find_bot_rec(p, inst, arr, x, q - 1, depth + 1)?;
            // w precedes bstar, so it wins ties
            Ok(if mtc(w) >= left.min(right) { (w, d) } else { (bstar, d) })
        } else {
            self.find_bot_rec(p, inst, arr, q, y, depth + 1)
        }
    }

    /// `max_{f∈[lo,hi]} ‖st⋄f‖` over real offsets with a maximizer.
    pub fn query(&self, p: &impl Provider, s: Vertex, t: Vertex, lo: u32, hi: u32) -> Result<Bottleneck> {
        let ap = p.paths();
        let Some(insts) = self.instances(ap, s, t, lo, hi)? else {
            let mut best = Bottleneck { offset: lo, dist: p.replacement(s, t, lo).dist, depth: 0 };
            for c in lo + 1..=hi {
                let d = p.replacement(s, t, c).dist;
                if d > best.dist {
                    best = Bottleneck { offset: c, dist: d, depth: 0 };
                }
            }
            return Ok(best);
        };
        let h = ap.hops(s, t);
        let mut out: Option<Bottleneck> = None;
        for inst in &insts {
            let (f, depth) = self.find_bot(p, inst)?;
            let offset = if inst.o == Side::Fwd { f } else { h - f };
            let cand = Bottleneck { offset, dist: p.replacement(s, t, offset).dist, depth };
            out = Some(match out {
                None => cand,
                Some(b) => {
                    let depth = b.depth.max(depth);
                    if cand.dist > b.dist || (cand.dist == b.dist && cand.offset < b.offset) {
                        Bottleneck { depth, ..cand }
                    } else {
                        Bottleneck { depth, ..b }
                    }
                }
            });
        }
        Ok(out.expect("two instances"))
    }
}

fn tail_term(ap: &AllPairs, p: &impl Provider, inst: &FindBotInstance, f: u32) -> Dist {
    if f == inst.pb {
        return INF;
    }
    dist_add(p.orep(inst.o, inst.r, inst.b, f).dist, ap.odist(inst.o, inst.b, inst.e))
}

fn mtc_with(ap: &AllPairs, p: &impl Provider, inst: &FindBotInstance, f: u32, arr: Option<&ArgMaxRmq>) -> Dist {
    let head = if f == inst.pa {
        INF
    } else {
        let v = match arr {
            Some(a) => a.value((f - inst.pa - 1) as usize),
            None => p.orep(inst.o, inst.a, inst.e, f - inst.pa).dist,
        };
        dist_add(ap.odist(inst.o, inst.r, inst.a), v)
    };
    head.min(tail_term(ap, p, inst, f))
}

/// `MTC(f)` for oriented offset `f` of the instance, straight from `p`.
pub fn mtc(p: &impl Provider, inst: &FindBotInstance, f: u32) -> Dist {
    mtc_with(p.paths(), p, inst, f, None)
}

/// Exact single failures from a table; interval values are bottleneck values
/// `max_{f∈[u,v]} ‖st⋄f‖`, memoized.
pub struct BottleneckProvider<'a> {
    ap: &'a AllPairs,
    table: &'a ReplacementTable,
    index: BottleneckIndex,
    probes: AtomicU64,
    max_depth: AtomicU32,
    memo: Mutex<HashMap<(Vertex, Vertex, u32, u32), Entry>>,
}

impl<'a> BottleneckProvider<'a> {
    pub fn new(ap: &'a AllPairs, table: &'a ReplacementTable, index: BottleneckIndex) -> Self {
        Self { ap, table, index, probes: AtomicU64::new(0), max_depth: AtomicU32::new(0), memo: Mutex::new(HashMap::new()) }
    }

    pub fn index(&self) -> &BottleneckIndex {
        &self.index
    }

    /// Deepest FindBot recursion seen so far.
    pub fn max_depth(&self) -> u32 {
        self.max_depth.load(Ordering::Relaxed)
    }

    pub fn bottleneck(&self, s: Vertex, t: Vertex, lo: u32, hi: u32) -> Result<Bottleneck> {
        let b = self.index.query(self, s, t, lo, hi)?;
        self.max_depth.fetch_max(b.depth, Ordering::Relaxed);
        Ok(b)
    }
}

impl Provider for BottleneckProvider<'_> {
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
        let b = self.bottleneck(s, t, lo, hi)?;
        let e = self.table.at(s, t, b.offset);
        self.memo.lock().unwrap().insert((s, t, lo, hi), e);
        Ok(e)
    }

    fn probes(&self) -> u64 {
        self.probes.load(Ordering::Relaxed)
    }
}

/// Bottleneck provider whose arrays are filled from exact table values.
pub fn provider_from_naive<'a>(g: &'a WeightedDigraph, ap: &'a AllPairs, table: &'a ReplacementTable, exec: Exec) -> BottleneckProvider<'a> {
    let naive = NaiveProvider::new(g, ap, table);
    BottleneckProvider::new(ap, table, build_bottleneck_index(&naive, exec))
}
