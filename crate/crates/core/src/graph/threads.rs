//! Decomposition into threads: maximal paths whose internal vertices have
//! degree two. A thread is the image of a subdivided edge, and every flow
//! carries a single (sign-normalized) value along it.

use super::{Digraph, EdgeId, Vertex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thread {
    /// Edge ids in traversal order.
    pub edges: Vec<EdgeId>,
    /// `+1` when the stored orientation agrees with the traversal direction.
    pub signs: Vec<i8>,
    pub start: Vertex,
    pub end: Vertex,
}

impl Thread {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Vertices strictly inside the thread, in traversal order.
    pub fn internal_vertices(&self, g: &Digraph) -> Vec<Vertex> {
        let mut at = self.start;
        let mut out = Vec::new();
        for &e in &self.edges[..self.edges.len() - 1] {
            at = g.other(e, at);
            out.push(at);
        }
        out
    }
}

/// A component in which every vertex has degree two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleComponent {
    pub edges: Vec<EdgeId>,
    pub signs: Vec<i8>,
    pub vertices: Vec<Vertex>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreadProfile {
    pub threads: Vec<Thread>,
    pub cycle_components: Vec<CycleComponent>,
    pub loops: Vec<EdgeId>,
    /// Anchor vertices (degree != 2, ignoring loops) that carry at least one thread.
    pub anchors: Vec<Vertex>,
    /// `thread_of[e]` is the index of the thread containing edge `e`.
    pub thread_of: Vec<Option<usize>>,
}

impl ThreadProfile {
    /// The suppressed multigraph: one edge per thread, between anchors
    /// renumbered in increasing order.
    pub fn suppressed(&self) -> Digraph {
        let index = |v: Vertex| self.anchors.binary_search(&v).expect("anchor");
        let edges = self.threads.iter().map(|t| (index(t.start), index(t.end))).collect();
        Digraph::new(self.anchors.len(), edges).expect("valid suppressed graph")
    }
}

/// Loops are ignored when computing degrees and listed separately, so a
/// graph with loops decomposes like the same graph with its loops removed.
pub fn thread_profile(g: &Digraph) -> ThreadProfile {
    let n = g.vertex_count();
    let m = g.edge_count();
    let mut inc: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
    let mut loops = Vec::new();
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if u == v {
            loops.push(e);
        } else {
            inc[u].push(e);
            inc[v].push(e);
        }
    }
    let deg: Vec<usize> = inc.iter().map(Vec::len).collect();

    let mut thread_of = vec![None; m];
    let mut visited = vec![false; m];
    let mut threads = Vec::new();
    for a in 0..n {
        if deg[a] == 2 {
            continue;
        }
        for &first in &inc[a] {
            if visited[first] {
                continue;
            }
            let mut edges = Vec::new();
            let mut signs = Vec::new();
            let mut at = a;
            let mut e = first;
            loop {
                visited[e] = true;
                edges.push(e);
                signs.push(if g.edge(e).0 == at { 1 } else { -1 });
                at = g.other(e, at);
                if deg[at] != 2 {
                    break;
                }
                e = if inc[at][0] == e { inc[at][1] } else { inc[at][0] };
            }
            let mut t = Thread { edges, signs, start: a, end: at };
            let flip = t.end < t.start || (t.end == t.start && t.edges.last() < t.edges.first());
            if flip {
                t.edges.reverse();
                t.signs.reverse();
                t.signs.iter_mut().for_each(|s| *s = -*s);
                std::mem::swap(&mut t.start, &mut t.end);
            }
            threads.push(t);
        }
    }
    threads.sort_by_key(|t| (t.start, t.end, t.edges[0]));
    for (i, t) in threads.iter().enumerate() {
        for &e in &t.edges {
            thread_of[e] = Some(i);
        }
    }

    let mut cycle_components = Vec::new();
    for s in 0..n {
        if deg[s] != 2 || inc[s].iter().all(|&e| visited[e]) {
            continue;
        }
        let mut edges = Vec::new();
        let mut signs = Vec::new();
        let mut vertices = vec![s];
        let mut at = s;
        let mut e = inc[s][0].min(inc[s][1]);
        while !visited[e] {
            visited[e] = true;
            edges.push(e);
            signs.push(if g.edge(e).0 == at { 1 } else { -1 });
            at = g.other(e, at);
            if at != s {
                vertices.push(at);
            }
            e = if inc[at][0] == e { inc[at][1] } else { inc[at][0] };
        }
        cycle_components.push(CycleComponent { edges, signs, vertices });
    }

    let mut anchors: Vec<Vertex> = threads.iter().flat_map(|t| [t.start, t.end]).collect();
    anchors.sort_unstable();
    anchors.dedup();

    ThreadProfile { threads, cycle_components, loops, anchors, thread_of }
}
