use crate::flows::EdgeVector;
use crate::graph::{structure_report, thread_profile, Digraph, EdgeId};
use crate::group::{Element, Group};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreprocessOptions {
    /// Apply the long-thread rules: a thread of length `|Γ|` or more is a NO,
    /// and a thread of length `|Γ| - 1` can be deleted.
    pub thread_rules: bool,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        PreprocessOptions { thread_rules: true }
    }
}

/// A connected piece of the reduced graph. `edges[i]` is the input edge
/// that became edge `i` of `graph`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub graph: Digraph,
    pub edges: Vec<EdgeId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reduction {
    /// Not connected; the certificate is on the input graph.
    No(EdgeVector),
    /// Connected iff every component is. No components means connected.
    Components(Vec<Component>),
}

#[derive(Debug, Clone)]
pub struct ReducedInstance {
    pub reduction: Reduction,
    pub steps: Vec<String>,
    /// Values that force every deleted thread to carry zero.
    forced: Vec<(EdgeId, Element)>,
    m: usize,
}

impl ReducedInstance {
    /// Turns a forbidden mapping on component `i` into one on the input
    /// graph with exactly the same satisfiability.
    pub fn lift(&self, i: usize, h: &[Element]) -> EdgeVector {
        let Reduction::Components(components) = &self.reduction else {
            panic!("lift called on an early verdict");
        };
        let mut out = self.base();
        for (&e, &a) in components[i].edges.iter().zip(h) {
            out[e] = a;
        }
        out
    }

    fn base(&self) -> EdgeVector {
        let mut out = vec![0; self.m];
        for &(e, a) in &self.forced {
            out[e] = a;
        }
        out
    }
}

/// Simplifies `g` until no rule applies.
///
/// Loops are dropped and cycle components short enough to be connected are
/// removed. A bridge, a long cycle component or (with thread rules) a thread
/// with at least `|Γ|` edges ends the reduction with a NO. A thread with
/// exactly `|Γ| - 1` edges can take some value whatever is forbidden on it,
/// so it is deleted; its certificate forbids all nonzero values, which
/// forces the thread to zero and makes it invisible to the rest.
pub fn preprocess(g: &Digraph, group: &Group, options: &PreprocessOptions) -> ReducedInstance {
    let k = group.order();
    let m = g.edge_count();
    let mut alive = vec![true; m];
    let mut forced: Vec<(EdgeId, Element)> = Vec::new();
    let mut steps = Vec::new();

    let early = |forced: &[(EdgeId, Element)], marks: &[(EdgeId, Element)], steps: Vec<String>| {
        let mut h = vec![0; m];
        for &(e, a) in forced.iter().chain(marks) {
            h[e] = a;
        }
        ReducedInstance { reduction: Reduction::No(h), steps, forced: forced.to_vec(), m }
    };
    // Forbids `k` distinct values along a path whose flow is a single value.
    let exhaust = |edges: &[EdgeId], signs: &[i8]| -> Vec<(EdgeId, Element)> {
        edges.iter().zip(signs).take(k).enumerate().map(|(i, (&e, &s))| (e, group.signed(s, i as Element))).collect()
    };

    loop {
        let ids: Vec<EdgeId> = (0..m).filter(|&e| alive[e]).collect();
        let w = Digraph::new(g.vertex_count(), ids.iter().map(|&e| g.edge(e)).collect()).expect("subgraph");

        let loops: Vec<EdgeId> = (0..w.edge_count()).filter(|&e| w.is_loop(e)).collect();
        if !loops.is_empty() {
            for &e in &loops {
                alive[ids[e]] = false;
            }
            steps.push(format!("removed {} loop(s)", loops.len()));
            continue;
        }

        let report = structure_report(&w);
        if let Some(&b) = report.bridges.iter().next() {
            steps.push(format!("bridge {} -> not connected", ids[b]));
            return early(&forced, &[], steps);
        }

        let profile = thread_profile(&w);
        let mut removed = false;
        for c in &profile.cycle_components {
            let len = c.edges.len();
            if len >= k {
                steps.push(format!("cycle component of length {len} -> not connected"));
                let orig: Vec<EdgeId> = c.edges.iter().map(|&e| ids[e]).collect();
                return early(&forced, &exhaust(&orig, &c.signs), steps);
            }
            for &e in &c.edges {
                alive[ids[e]] = false;
            }
            steps.push(format!("removed connected cycle component of length {len}"));
            removed = true;
        }
        if removed {
            continue;
        }

        if options.thread_rules {
            if let Some(t) = profile.threads.iter().find(|t| t.len() >= k) {
                steps.push(format!("thread of length {} -> not connected", t.len()));
                let orig: Vec<EdgeId> = t.edges.iter().map(|&e| ids[e]).collect();
                return early(&forced, &exhaust(&orig, &t.signs), steps);
            }
            if let Some(t) = profile.threads.iter().find(|t| t.len() + 1 == k) {
                for (i, (&e, &s)) in t.edges.iter().zip(&t.signs).enumerate() {
                    alive[ids[e]] = false;
                    forced.push((ids[e], group.signed(s, (i + 1) as Element)));
                }
                let orig: Vec<EdgeId> = t.edges.iter().map(|&e| ids[e]).collect();
                steps.push(format!("deleted thread {orig:?} of length {}", t.len()));
                continue;
            }
        }

        let mut components = Vec::new();
        for vertices in &report.components {
            let mut index = vec![usize::MAX; g.vertex_count()];
            for (i, &v) in vertices.iter().enumerate() {
                index[v] = i;
            }
            let edges: Vec<EdgeId> = (0..w.edge_count()).filter(|&e| index[w.edge(e).0] != usize::MAX).collect();
            if edges.is_empty() {
                continue;
            }
            let graph = Digraph::new(
                vertices.len(),
                edges.iter().map(|&e| (index[w.edge(e).0], index[w.edge(e).1])).collect(),
            )
            .expect("component");
            components.push(Component { graph, edges: edges.iter().map(|&e| ids[e]).collect() });
        }
        if components.len() > 1 {
            steps.push(format!("split into {} components", components.len()));
        }
        return ReducedInstance { reduction: Reduction::Components(components), steps, forced, m };
    }
}
