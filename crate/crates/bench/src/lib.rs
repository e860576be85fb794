//! Fixtures shared by the benchmarks.

use tenttile::boundary::{build_boundary_graph, Variant};
use tenttile::tiling::CoverageConfig;

/// Adjacency matrix of the self-replicating boundary graph of a record.
pub fn sr_adjacency(index: i32) -> Vec<Vec<i64>> {
    build_boundary_graph(index, Variant::Sr)
        .expect("record with a boundary graph")
        .adjacency()
}

/// A coarse coverage configuration that still exercises every translate.
pub fn coarse_coverage(resolution: usize) -> CoverageConfig {
    CoverageConfig {
        resolution: Some(resolution),
        ..Default::default()
    }
}
