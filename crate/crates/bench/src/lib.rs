//! Workloads shared by the benchmarks and the performance acceptance check.

use groupcon::solver::{decide, Algorithm, DecideOptions};
use groupcon::{Digraph, Group, Result};

/// The cube with two added vertices: each of the 12 edges subdivided twice,
/// then each of the 66 edge pairs subdivided once.
pub fn cube_two_added() -> Vec<Digraph> {
    let cube = Digraph::cube();
    let m = cube.edge_count();
    let mut out = Vec::new();
    for a in 0..m {
        for b in a..m {
            let mut counts = vec![0; m];
            counts[a] += 1;
            counts[b] += 1;
            out.push(cube.subdivide_all(&counts).expect("cube edge"));
        }
    }
    out
}

pub fn fast_options(thread_opts: bool) -> DecideOptions {
    DecideOptions { algorithm: Algorithm::Fast, thread_opts, ..DecideOptions::default() }
}

/// Decides every graph with the fast solver and returns the verdicts.
pub fn run_workload(graphs: &[Digraph], group: &Group, thread_opts: bool) -> Result<Vec<bool>> {
    let options = fast_options(thread_opts);
    graphs.iter().map(|g| decide(g, group, &options).map(|v| v.connected)).collect()
}
