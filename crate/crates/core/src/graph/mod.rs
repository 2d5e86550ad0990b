//! Oriented multigraphs. Orientation is bookkeeping only: every notion in this
//! crate is invariant under reversing an edge and negating its value.

mod io;
mod structure;
mod threads;

pub use io::{parse_edgelist, parse_graph6, parse_graph6_lines};
pub use structure::{edge_connectivity, structure_report, StructureReport};
pub use threads::{thread_profile, CycleComponent, Thread, ThreadProfile};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vertex = usize;
pub type EdgeId = usize;

/// An oriented multigraph. Loops and parallel edges are allowed; edge ids are
/// positions in `edges`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Digraph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
}

impl Digraph {
    pub fn new(n: usize, edges: Vec<(Vertex, Vertex)>) -> Result<Self> {
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= n || v >= n) {
            return Err(Error::Precondition(format!("edge ({u},{v}) out of range for {n} vertices")));
        }
        Ok(Digraph { n, edges })
    }

    pub fn empty(n: usize) -> Self {
        Digraph { n, edges: Vec::new() }
    }

    /// Undirected edges oriented from the smaller endpoint to the larger.
    pub fn from_undirected(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        Self::new(n, edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect())
    }

    pub fn cycle(len: usize) -> Self {
        assert!(len >= 1);
        Digraph { n: len, edges: (0..len).map(|i| (i, (i + 1) % len)).collect() }
    }

    pub fn path(vertices: usize) -> Self {
        Digraph { n: vertices, edges: (1..vertices).map(|i| (i - 1, i)).collect() }
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for j in 1..n {
            for i in 0..j {
                edges.push((i, j));
            }
        }
        Digraph { n, edges }
    }

    /// The 3-cube Q3, vertices labelled by their bit patterns.
    pub fn cube() -> Self {
        let mut edges = Vec::new();
        for v in 0..8usize {
            for bit in [1, 2, 4] {
                if v & bit == 0 {
                    edges.push((v, v | bit));
                }
            }
        }
        Digraph { n: 8, edges }
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Digraph::from_undirected(10, &edges).expect("valid")
    }

    pub fn octahedron() -> Self {
        let mut edges = Vec::new();
        for j in 1..6 {
            for i in 0..j {
                if !(i % 2 == 0 && j == i + 1) {
                    edges.push((i, j));
                }
            }
        }
        Digraph { n: 6, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> (Vertex, Vertex) {
        self.edges[e]
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        self.edges[e].0 == self.edges[e].1
    }

    /// Degree counting a loop twice.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Incident edge ids per vertex, in increasing id order. A loop appears once.
    pub fn incidence(&self) -> Vec<Vec<EdgeId>> {
        let mut inc = vec![Vec::new(); self.n];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            inc[u].push(e);
            if v != u {
                inc[v].push(e);
            }
        }
        inc
    }

    /// The endpoint of `e` opposite to `v`.
    #[inline]
    pub fn other(&self, e: EdgeId, v: Vertex) -> Vertex {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Replaces edge `e = (u,v)` by the directed path `u -> w1 -> ... -> wk -> v`.
    /// Edge `e` keeps its id as the first segment; the other segments are
    /// appended.
    pub fn subdivide(&self, e: EdgeId, k: usize) -> Result<Digraph> {
        if e >= self.edges.len() {
            return Err(Error::UnknownEdge(e));
        }
        let mut g = self.clone();
        if k == 0 {
            return Ok(g);
        }
        let (u, v) = g.edges[e];
        let first = g.n;
        g.n += k;
        g.edges[e] = (u, first);
        for i in 0..k {
            let to = if i + 1 < k { first + i + 1 } else { v };
            g.edges.push((first + i, to));
        }
        Ok(g)
    }

    /// Applies `counts[e]` subdivisions to each edge `e`.
    pub fn subdivide_all(&self, counts: &[usize]) -> Result<Digraph> {
        if counts.len() != self.edges.len() {
            return Err(Error::SizeMismatch { expected: self.edges.len(), got: counts.len() });
        }
        let mut g = self.clone();
        for (e, &k) in counts.iter().enumerate() {
            g = g.subdivide(e, k)?;
        }
        Ok(g)
    }

    pub fn with_edge(&self, u: Vertex, v: Vertex) -> Result<Digraph> {
        let mut edges = self.edges.clone();
        edges.push((u, v));
        Digraph::new(self.n, edges)
    }

    /// Same graph with edge `e` reversed.
    pub fn reversed(&self, e: EdgeId) -> Digraph {
        let mut g = self.clone();
        let (u, v) = g.edges[e];
        g.edges[e] = (v, u);
        g
    }

    /// Disjoint union; vertices and edges of `other` are shifted after ours.
    pub fn disjoint_union(&self, other: &Digraph) -> Digraph {
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(u, v)| (u + self.n, v + self.n)));
        Digraph { n: self.n + other.n, edges }
    }

    /// Renders in the plain edge-list format accepted by [`parse_edgelist`].
    pub fn to_edgelist(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subdivide_examples() {
        let c4 = Digraph::cycle(3).subdivide(1, 1).unwrap();
        assert_eq!((c4.vertex_count(), c4.edge_count()), (4, 4));
        assert!(c4.degrees().iter().all(|&d| d == 2));

        let p = Digraph::path(2).subdivide(0, 2).unwrap();
        assert_eq!(p.edges(), &[(0, 2), (2, 3), (3, 1)]);

        let looped = Digraph::new(1, vec![(0, 0)]).unwrap().subdivide(0, 1).unwrap();
        assert_eq!(looped.edges(), &[(0, 1), (1, 0)]);

        assert_eq!(Digraph::cycle(3).subdivide(7, 1), Err(Error::UnknownEdge(7)));
    }

    #[test]
    fn subdivide_keeps_other_ids() {
        let g = Digraph::cube();
        let s = g.subdivide(5, 3).unwrap();
        assert_eq!(s.vertex_count(), 11);
        assert_eq!(s.edge_count(), 15);
        for e in 0..12 {
            if e != 5 {
                assert_eq!(s.edge(e), g.edge(e));
            }
        }
        assert_eq!(s.edge(5).0, g.edge(5).0);
        assert_eq!(s.edge(14).1, g.edge(5).1);
    }

    #[test]
    fn named_graphs() {
        assert_eq!(Digraph::cube().edge_count(), 12);
        assert!(Digraph::cube().degrees().iter().all(|&d| d == 3));
        assert!(Digraph::petersen().degrees().iter().all(|&d| d == 3));
        assert_eq!(Digraph::petersen().edge_count(), 15);
        assert!(Digraph::octahedron().degrees().iter().all(|&d| d == 4));
        assert_eq!(Digraph::complete(5).edge_count(), 10);
    }

    #[test]
    fn rejects_out_of_range_vertices() {
        assert!(Digraph::new(2, vec![(0, 2)]).is_err());
    }
}
