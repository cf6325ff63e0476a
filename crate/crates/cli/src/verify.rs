//! Exhaustive differential check against Dijkstra on `G − f`.

use anyhow::Result;
use dso::gen::{erdos_renyi, grid, path_with_chords};
use dso::io::OracleKind;
use dso::reference::{replacement_distance_naive, Entry, QueryAnswer};
use dso::{Vertex, WeightedDigraph, INF};

use crate::make::{self, Recipe};

const SHOWN_PER_RUN: usize = 10;

/// Erdős–Rényi graphs for each size, density and seed, plus an 8×8 grid and
/// a 64-vertex path with chords.
pub fn corpus(sizes: &[usize], seeds: u64) -> Vec<(String, WeightedDigraph)> {
    let mut out = Vec::new();
    for &n in sizes {
        for p in [0.1, 0.3, 0.6] {
            for seed in 0..seeds {
                out.push((format!("er(n={n}, p={p}, seed={seed})"), erdos_renyi(n, p, 10, seed)));
            }
        }
    }
    out.push(("grid(8x8)".into(), grid(8, 8)));
    out.push(("path-with-chords(n=64)".into(), path_with_chords(64, 32, 7)));
    out
}

fn bump(e: Entry) -> Entry {
    if e.dist == INF {
        e
    } else {
        Entry { dist: e.dist + 1, ..e }
    }
}

/// Prints a line per mode and every mismatch (up to a cap per graph);
/// returns whether everything matched.
pub fn run(corpus: &[(String, WeightedDigraph)], recipes: &[Recipe], corrupt: bool) -> Result<bool> {
    let mut mismatches = vec![0usize; recipes.len()];
    let mut checked = 0usize;
    for (name, g) in corpus {
        let n = g.n() as Vertex;
        let triples: Vec<(Vertex, Vertex, Vertex)> =
            (0..n).flat_map(|s| (0..n).flat_map(move |t| (0..n).map(move |f| (s, t, f)))).filter(|&(s, t, f)| s != t && f != s && f != t).collect();
        let want: Vec<QueryAnswer> = triples.iter().map(|&(s, t, f)| replacement_distance_naive(g, s, t, f)).collect();
        checked += triples.len();
        for (i, recipe) in recipes.iter().enumerate() {
            let mut oracle = make::build(g, recipe)?.oracle;
            if corrupt {
                if let OracleKind::Compact(c) = &mut oracle {
                    c.corrupt_windows(bump);
                }
            }
            let o = oracle.as_oracle();
            let mut shown = 0;
            for (&(s, t, f), &w) in triples.iter().zip(&want) {
                let got = o.query(s, t, f).unwrap_or(QueryAnswer::Invalid);
                if got != w {
                    mismatches[i] += 1;
                    if shown < SHOWN_PER_RUN {
                        println!("MISMATCH {name} {} s={} t={} f={}: got {got}, want {w}", recipe.mode.name(), s + 1, t + 1, f + 1);
                        shown += 1;
                    }
                }
            }
        }
    }
    for (r, m) in recipes.iter().zip(&mismatches) {
        println!("{}: {} graphs, {checked} triples, {m} mismatches", r.mode.name(), corpus.len());
    }
    let ok = mismatches.iter().all(|&m| m == 0);
    println!("{}", if ok { "PASS" } else { "FAIL" });
    Ok(ok)
}
