//! Seeded graph generators for tests, verification corpora and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Vertex, WeightedDigraph};

/// Erdős–Rényi digraph: each ordered pair independently with probability
/// `p`, weights uniform in `1..=max_w`.
pub fn erdos_renyi(n: usize, p: f64, max_w: u64, seed: u64) -> WeightedDigraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as Vertex {
        for v in 0..n as Vertex {
            if u != v && rng.gen_bool(p) {
                edges.push((u, v, rng.gen_range(1..=max_w)));
            }
        }
    }
    WeightedDigraph::from_edges(n, edges).expect("generated edges are in range")
}

/// `rows × cols` grid with unit-weight edges in both directions.
pub fn grid(rows: usize, cols: usize) -> WeightedDigraph {
    let id = |r: usize, c: usize| (r * cols + c) as Vertex;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1), 1));
                edges.push((id(r, c + 1), id(r, c), 1));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c), 1));
                edges.push((id(r + 1, c), id(r, c), 1));
            }
        }
    }
    WeightedDigraph::from_edges(rows * cols, edges).expect("grid ids are in range")
}

/// Unit path `0 → 1 → … → n−1`, its unit reversal, and `chords` forward
/// chords `u → v` weighted slightly above the path distance, so that shortest
/// paths stay long and every failure has detours of varied length.
pub fn path_with_chords(n: usize, chords: usize, seed: u64) -> WeightedDigraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for v in 1..n as Vertex {
        edges.push((v - 1, v, 1));
        edges.push((v, v - 1, 1));
    }
    if n >= 3 {
        for _ in 0..chords {
            let u = rng.gen_range(0..n - 2);
            let v = rng.gen_range(u + 2..n);
            let span = (v - u) as u64;
            edges.push((u as Vertex, v as Vertex, span + rng.gen_range(1..=span.max(2))));
        }
    }
    WeightedDigraph::from_edges(n, edges).expect("generated edges are in range")
}
