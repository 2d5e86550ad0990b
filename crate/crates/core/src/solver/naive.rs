use crate::error::{Error, Result};
use crate::flows::{EdgeVector, FlowSpace};
use crate::graph::{Digraph, EdgeId};
use crate::group::{Element, Group};

use super::{Stats, Verdict};

/// Largest number of forbidden mappings either definitional solver will try.
pub const ULTRA_BUDGET: u64 = 100_000_000;

/// Tries every forbidden mapping that may be nonzero only on `support`, in
/// lexicographic order (first support edge most significant), and returns
/// the first one without a satisfying flow.
fn first_unsatisfied(g: &Digraph, group: &Group, support: &[EdgeId], stats: &mut Stats) -> Result<Option<EdgeVector>> {
    let k = group.order() as u64;
    let total = k
        .checked_pow(support.len() as u32)
        .filter(|&t| t <= ULTRA_BUDGET)
        .ok_or_else(|| Error::Budget(format!("{k}^{} forbidden mappings exceed the budget", support.len())))?;
    let fs = FlowSpace::new(g, group);
    let mut h = vec![0 as Element; g.edge_count()];
    // The last satisfying flow usually satisfies the next mapping too.
    let mut last: Option<EdgeVector> = None;
    for _ in 0..total {
        stats.mappings_enumerated += 1;
        let reused = last.as_ref().is_some_and(|f| f.iter().zip(&h).all(|(a, b)| a != b));
        if !reused {
            stats.flow_searches += 1;
            match fs.find_satisfying(&h)? {
                Some(f) => last = Some(f),
                None => return Ok(Some(h)),
            }
        }
        for &e in support.iter().rev() {
            h[e] += 1;
            if h[e] as u64 == k {
                h[e] = 0;
            } else {
                break;
            }
        }
    }
    Ok(None)
}

/// Checks the definition directly: every mapping on every edge.
pub fn solve_ultra_naive(g: &Digraph, group: &Group) -> Result<Verdict> {
    let mut stats = Stats::default();
    let support: Vec<EdgeId> = (0..g.edge_count()).collect();
    Ok(match first_unsatisfied(g, group, &support, &mut stats)? {
        Some(h) => Verdict::no("ultra", h, stats),
        None => Verdict::yes("ultra", stats),
    })
}

/// Checks one mapping per flow-equivalence class: those vanishing off a
/// fixed spanning forest.
pub fn solve_naive(g: &Digraph, group: &Group) -> Result<Verdict> {
    let mut stats = Stats::default();
    let fs = FlowSpace::new(g, group);
    let tree = &fs.spanning().tree_edges;
    stats.classes_total = (group.order() as u64).pow(tree.len() as u32);
    Ok(match first_unsatisfied(g, group, tree, &mut stats)? {
        Some(h) => Verdict::no("naive", h, stats),
        None => Verdict::yes("naive", stats),
    })
}
