//! Distance sensitivity oracles for single vertex failures in non-negatively
//! weighted digraphs.
//!
//! The compact oracle answers `‖st⋄f‖` (the `s`→`t` distance avoiding `f`)
//! with a constant number of table probes in `O(n²)` entries. A sparse-table
//! baseline, a bottleneck-search preprocessing pipeline and brute-force
//! reference oracles live alongside it.

pub mod ancestor;
pub mod bottleneck;
pub mod compact;
pub mod error;
pub mod gen;
pub mod graph;
pub mod io;
pub mod orient;
pub mod par;
pub mod partition;
pub mod provider;
pub mod recover;
pub mod reference;
pub mod sparse;
pub mod trace;
pub mod tree;

pub use error::{DsoError, Result};
pub use graph::{load_graph, Dist, Vertex, WeightedDigraph, INF, NONE};
