use std::collections::{BTreeSet, VecDeque};

use super::{Digraph, EdgeId, Vertex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureReport {
    pub bridges: BTreeSet<EdgeId>,
    /// Vertex partition, each part sorted, parts ordered by smallest vertex.
    pub components: Vec<Vec<Vertex>>,
    pub loops: BTreeSet<EdgeId>,
}

impl StructureReport {
    pub fn is_connected(&self) -> bool {
        self.components.len() <= 1
    }
}

pub fn structure_report(g: &Digraph) -> StructureReport {
    let n = g.vertex_count();
    let inc = g.incidence();
    let loops: BTreeSet<EdgeId> = (0..g.edge_count()).filter(|&e| g.is_loop(e)).collect();

    let mut comp = vec![usize::MAX; n];
    let mut components = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut part = vec![s];
        comp[s] = id;
        let mut i = 0;
        while i < part.len() {
            let v = part[i];
            i += 1;
            for &e in &inc[v] {
                let w = g.other(e, v);
                if comp[w] == usize::MAX {
                    comp[w] = id;
                    part.push(w);
                }
            }
        }
        part.sort_unstable();
        components.push(part);
    }

    // Iterative lowpoint DFS; parent edges are skipped by id so parallel
    // edges are handled correctly.
    let mut bridges = BTreeSet::new();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut timer = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        let mut stack: Vec<(Vertex, Option<EdgeId>, usize)> = vec![(root, None, 0)];
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        while let Some(&mut (v, parent, ref mut next)) = stack.last_mut() {
            if *next < inc[v].len() {
                let e = inc[v][*next];
                *next += 1;
                if Some(e) == parent || g.is_loop(e) {
                    continue;
                }
                let w = g.other(e, v);
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, Some(e), 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let (Some(pe), Some(&(u, _, _))) = (parent, stack.last()) {
                    low[u] = low[u].min(low[v]);
                    if low[v] > disc[u] {
                        bridges.insert(pe);
                    }
                }
            }
        }
    }

    StructureReport { bridges, components, loops }
}

/// Minimum number of edges whose removal disconnects the graph, computed as
/// the minimum over `v != 0` of the unit-capacity max flow between vertex 0
/// and `v`. Disconnected graphs (and graphs with fewer than two vertices)
/// give 0.
pub fn edge_connectivity(g: &Digraph) -> usize {
    let n = g.vertex_count();
    if n < 2 || !structure_report(g).is_connected() {
        return 0;
    }
    (1..n).map(|t| max_flow_unit(g, 0, t)).min().unwrap_or(0)
}

/// Edmonds-Karp on the undirected multigraph with unit capacities.
fn max_flow_unit(g: &Digraph, s: Vertex, t: Vertex) -> usize {
    let n = g.vertex_count();
    // Arc 2e goes tail->head, arc 2e+1 head->tail; each has capacity 1.
    let mut flow = vec![0i32; 2 * g.edge_count()];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if u != v {
            adj[u].push(2 * e);
            adj[v].push(2 * e + 1);
        }
    }
    let head = |arc: usize| {
        let (u, v) = g.edge(arc / 2);
        if arc.is_multiple_of(2) {
            v
        } else {
            u
        }
    };
    let residual = |flow: &[i32], arc: usize| 1 - flow[arc] + flow[arc ^ 1];

    let mut total = 0;
    loop {
        let mut pred = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            if v == t {
                break;
            }
            for &arc in &adj[v] {
                let w = head(arc);
                if !seen[w] && residual(&flow, arc) > 0 {
                    seen[w] = true;
                    pred[w] = arc;
                    queue.push_back(w);
                }
            }
        }
        if !seen[t] {
            return total;
        }
        let mut v = t;
        while v != s {
            let arc = pred[v];
            if flow[arc ^ 1] > 0 {
                flow[arc ^ 1] -= 1;
            } else {
                flow[arc] += 1;
            }
            v = head(arc ^ 1);
        }
        total += 1;
    }
}
