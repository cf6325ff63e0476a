//! Scaling table: one CSV row per size and mode, averaged over seeds.

use std::hint::black_box;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::Result;
use clap::ValueEnum;
use dso::gen::{erdos_renyi, grid, path_with_chords};
use dso::trace::Trace;
use dso::{Vertex, WeightedDigraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::make::{self, Recipe};

const QUERIES: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Grid,
    Path,
    Er,
}

impl Family {
    fn graph(self, n: usize, seed: u64) -> WeightedDigraph {
        match self {
            Family::Grid => {
                let rows = (1..=n).take_while(|r| r * r <= n).filter(|r| n.is_multiple_of(*r)).last().unwrap_or(1);
                grid(rows, n / rows)
            }
            Family::Path => path_with_chords(n, n / 2, seed),
            Family::Er => erdos_renyi(n, (4.0 / n as f64).min(1.0), 100, seed),
        }
    }
}

#[derive(Serialize)]
struct Row {
    n: usize,
    mode: &'static str,
    entries: u64,
    entries_per_n2: f64,
    build_ms: f64,
    mean_probes: f64,
    mean_query_ns: f64,
}

/// Interior failures on random connected pairs; empty if the graph has no
/// path of two or more hops.
fn sample(o: &dyn dso::sparse::Oracle, n: usize, seed: u64) -> Vec<(Vertex, Vertex, Vertex)> {
    let ap = o.paths();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if ap.max_hops() < 2 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(QUERIES);
    while out.len() < QUERIES {
        let (s, t) = (rng.gen_range(0..n) as Vertex, rng.gen_range(0..n) as Vertex);
        let h = ap.hops(s, t);
        if h != u32::MAX && h >= 2 {
            out.push((s, t, ap.at(s, t, rng.gen_range(1..h))));
        }
    }
    out
}

pub fn run(family: Family, sizes: &[usize], seeds: u64, recipes: &[Recipe], out: Option<&Path>) -> Result<()> {
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    let seeds = seeds.max(1);
    for &n in sizes {
        let graphs: Vec<WeightedDigraph> = (0..seeds).map(|s| family.graph(n, s)).collect();
        for recipe in recipes {
            let (mut entries, mut build_ms, mut probes, mut ns, mut asked) = (0f64, 0f64, 0f64, 0f64, 0usize);
            for (seed, g) in graphs.iter().enumerate() {
                let built = make::build(g, recipe)?;
                entries += make::entries(&built.oracle) as f64;
                build_ms += built.elapsed.as_secs_f64() * 1e3;
                let o = built.oracle.as_oracle();
                let qs = sample(o, g.n(), seed as u64);
                for &(s, t, f) in &qs {
                    let mut tr = Trace::default();
                    o.query_traced(s, t, f, &mut tr)?;
                    probes += tr.probes as f64;
                }
                let start = Instant::now();
                for &(s, t, f) in &qs {
                    black_box(o.query(s, t, f)?);
                }
                ns += start.elapsed().as_nanos() as f64;
                asked += qs.len();
            }
            let k = seeds as f64;
            let per_query = |x: f64| if asked == 0 { 0.0 } else { x / asked as f64 };
            let nn = g_n(&graphs) as f64;
            w.serialize(Row {
                n: g_n(&graphs),
                mode: recipe.mode.name(),
                entries: (entries / k).round() as u64,
                entries_per_n2: entries / k / (nn * nn),
                build_ms: build_ms / k,
                mean_probes: per_query(probes),
                mean_query_ns: per_query(ns),
            })?;
            w.flush()?;
        }
    }
    Ok(())
}

fn g_n(graphs: &[WeightedDigraph]) -> usize {
    graphs.first().map_or(0, WeightedDigraph::n)
}
