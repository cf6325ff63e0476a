#![allow(dead_code)]

use dso::gen::{erdos_renyi, grid, path_with_chords};
use dso::WeightedDigraph;

/// Differential corpus: Erdős–Rényi over three sizes, three densities and
/// twenty seeds, an 8×8 grid and a 64-vertex path with chords.
pub fn corpus() -> Vec<(String, WeightedDigraph)> {
    let mut out = Vec::new();
    for n in [20, 40, 60] {
        for p in [0.1, 0.3, 0.6] {
            for seed in 0..20 {
                out.push((format!("er n={n} p={p} seed={seed}"), erdos_renyi(n, p, 10, seed)));
            }
        }
    }
    out.push(("grid 8x8".into(), grid(8, 8)));
    out.push(("path+chords n=64".into(), path_with_chords(64, 32, 7)));
    out
}

/// Small graphs for exhaustive interval checks.
pub fn small_graphs() -> Vec<(String, WeightedDigraph)> {
    let mut out = Vec::new();
    for n in [12, 20, 30] {
        for p in [0.15, 0.3] {
            for seed in 0..3 {
                out.push((format!("er n={n} p={p} seed={seed}"), erdos_renyi(n, p, 6, seed)));
            }
        }
    }
    out.push(("grid 5x6".into(), grid(5, 6)));
    out.push(("path+chords n=30".into(), path_with_chords(30, 15, 2)));
    out
}

/// Every ordered triple with `s ≠ t` and `f ∉ {s, t}`.
pub fn triples(n: usize) -> impl Iterator<Item = (u32, u32, u32)> {
    let n = n as u32;
    (0..n).flat_map(move |s| (0..n).flat_map(move |t| (0..n).map(move |f| (s, t, f)))).filter(|&(s, t, f)| s != t && f != s && f != t)
}
