//! The flow space of a digraph over a group.
//!
//! A flow is determined by its values on the non-tree edges of a spanning
//! forest: it is the sum of the fundamental cycles scaled by those values.
//! [`FlowSpace`] enumerates all `|Γ|^rank` flows in lexicographic order of
//! the non-tree assignment, updating one fundamental cycle per step. This
//! exhaustive enumeration is the correctness anchor for every other solver.

use crate::error::{Error, Result};
use crate::graph::{Digraph, EdgeId};
use crate::group::{Element, Group};

/// A total map from edge ids to group elements. Depending on context it is a
/// flow or a forbidden mapping.
pub type EdgeVector = Vec<Element>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningStructure {
    pub in_tree: Vec<bool>,
    pub tree_edges: Vec<EdgeId>,
    pub nontree_edges: Vec<EdgeId>,
    /// Fundamental cycle of each non-tree edge (same order as
    /// `nontree_edges`), as `(edge, sign)` with the non-tree edge first and
    /// signed `+1`.
    pub cycles: Vec<Vec<(EdgeId, i8)>>,
    pub components: usize,
}

impl SpanningStructure {
    /// Cycle rank `m - n + c`.
    pub fn rank(&self) -> usize {
        self.nontree_edges.len()
    }
}

/// Spanning forest grown by lowest edge id first.
pub fn spanning_structure(g: &Digraph) -> SpanningStructure {
    let order: Vec<EdgeId> = (0..g.edge_count()).collect();
    spanning_structure_with_priority(g, &order)
}

/// Spanning forest taking edges greedily in `priority` order; edges missing
/// from `priority` are considered afterwards by id.
pub fn spanning_structure_with_priority(g: &Digraph, priority: &[EdgeId]) -> SpanningStructure {
    let n = g.vertex_count();
    let m = g.edge_count();
    let mut order = priority.to_vec();
    let mut listed = vec![false; m];
    for &e in priority {
        listed[e] = true;
    }
    order.extend((0..m).filter(|&e| !listed[e]));

    let mut dsu = Dsu::new(n);
    let mut in_tree = vec![false; m];
    for &e in &order {
        let (u, v) = g.edge(e);
        if dsu.union(u, v) {
            in_tree[e] = true;
        }
    }
    let components = (0..n).filter(|&v| dsu.find(v) == v).count();

    // Root each tree and record parent edges and depths.
    let mut parent_edge = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut seen = vec![false; n];
    let mut tree_adj: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
    for e in (0..m).filter(|&e| in_tree[e]) {
        let (u, v) = g.edge(e);
        tree_adj[u].push(e);
        tree_adj[v].push(e);
    }
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &e in &tree_adj[v] {
                let w = g.other(e, v);
                if !seen[w] {
                    seen[w] = true;
                    parent_edge[w] = e;
                    depth[w] = depth[v] + 1;
                    stack.push(w);
                }
            }
        }
    }

    let sign = |e: EdgeId, from: usize| -> i8 {
        if g.edge(e).0 == from {
            1
        } else {
            -1
        }
    };
    let mut nontree_edges = Vec::new();
    let mut cycles = Vec::new();
    for f in (0..m).filter(|&e| !in_tree[e]) {
        let (u, v) = g.edge(f);
        // The cycle runs u -> v along f, then back from v to u in the tree.
        let mut up_from_v = Vec::new();
        let mut down_to_u = Vec::new();
        let (mut a, mut b) = (v, u);
        while depth[a] > depth[b] {
            let e = parent_edge[a];
            up_from_v.push((e, sign(e, a)));
            a = g.other(e, a);
        }
        while depth[b] > depth[a] {
            let e = parent_edge[b];
            down_to_u.push((e, -sign(e, b)));
            b = g.other(e, b);
        }
        while a != b {
            let ea = parent_edge[a];
            up_from_v.push((ea, sign(ea, a)));
            a = g.other(ea, a);
            let eb = parent_edge[b];
            down_to_u.push((eb, -sign(eb, b)));
            b = g.other(eb, b);
        }
        let mut cycle = vec![(f, 1i8)];
        cycle.extend(up_from_v);
        cycle.extend(down_to_u.into_iter().rev());
        nontree_edges.push(f);
        cycles.push(cycle);
    }

    let tree_edges = (0..m).filter(|&e| in_tree[e]).collect();
    SpanningStructure { in_tree, tree_edges, nontree_edges, cycles, components }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Kirchhoff's law at every vertex. Loops are balanced by construction.
pub fn is_flow(g: &Digraph, group: &Group, v: &[Element]) -> Result<bool> {
    check_len(g, v)?;
    let mut balance = vec![0 as Element; g.vertex_count()];
    for (e, &(t, h)) in g.edges().iter().enumerate() {
        if t != h {
            balance[h] = group.add(balance[h], v[e]);
            balance[t] = group.sub(balance[t], v[e]);
        }
    }
    Ok(balance.iter().all(|&b| b == 0))
}

pub(crate) fn check_len(g: &Digraph, v: &[Element]) -> Result<()> {
    if v.len() != g.edge_count() {
        return Err(Error::SizeMismatch { expected: g.edge_count(), got: v.len() });
    }
    Ok(())
}

/// A digraph, a group and a fixed spanning structure: everything needed to
/// enumerate flows.
#[derive(Debug, Clone)]
pub struct FlowSpace {
    graph: Digraph,
    group: Group,
    span: SpanningStructure,
    /// Edges whose value is final once the first `i + 1` non-tree digits are
    /// fixed, i.e. whose last fundamental cycle is the i-th.
    settled: Vec<Vec<EdgeId>>,
    /// Edges on no fundamental cycle; every flow is zero there.
    rigid: Vec<EdgeId>,
}

impl FlowSpace {
    pub fn new(graph: &Digraph, group: &Group) -> Self {
        Self::with_spanning(graph, group, spanning_structure(graph))
    }

    pub fn with_spanning(graph: &Digraph, group: &Group, span: SpanningStructure) -> Self {
        let mut last = vec![None; graph.edge_count()];
        for (i, cycle) in span.cycles.iter().enumerate() {
            for &(e, _) in cycle {
                last[e] = Some(i);
            }
        }
        let mut settled = vec![Vec::new(); span.rank()];
        let mut rigid = Vec::new();
        for (e, l) in last.into_iter().enumerate() {
            match l {
                Some(i) => settled[i].push(e),
                None => rigid.push(e),
            }
        }
        FlowSpace { graph: graph.clone(), group: group.clone(), span, settled, rigid }
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn spanning(&self) -> &SpanningStructure {
        &self.span
    }

    pub fn rank(&self) -> usize {
        self.span.rank()
    }

    /// Number of flows, or `None` if it does not fit in a `u64`.
    pub fn size(&self) -> Option<u64> {
        (self.group.order() as u64).checked_pow(self.rank() as u32)
    }

    /// The unique flow that takes `assignment[i]` on the i-th non-tree edge.
    pub fn flow_from_nontree(&self, assignment: &[Element]) -> Result<EdgeVector> {
        if assignment.len() != self.rank() {
            return Err(Error::SizeMismatch { expected: self.rank(), got: assignment.len() });
        }
        let mut flow = vec![0; self.graph.edge_count()];
        for (cycle, &a) in self.span.cycles.iter().zip(assignment) {
            for &(e, s) in cycle {
                flow[e] = self.group.add(flow[e], self.group.signed(s, a));
            }
        }
        Ok(flow)
    }

    /// Visits flows in lexicographic order of their non-tree assignment,
    /// reporting the number of edges where the flow agrees with `h`. The
    /// visitor returns `true` to stop.
    fn walk(&self, h: &[Element], mut visit: impl FnMut(&[Element], usize) -> bool) {
        let g = &self.group;
        let k = g.order() as Element;
        let rank = self.rank();
        let mut flow: EdgeVector = vec![0; self.graph.edge_count()];
        let mut digits = vec![0 as Element; rank];
        let mut agree = h.iter().filter(|&&x| x == 0).count();
        loop {
            if visit(&flow, agree) {
                return;
            }
            let mut i = rank;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                let old = digits[i];
                let new = if old + 1 == k { 0 } else { old + 1 };
                digits[i] = new;
                let delta = g.sub(new, old);
                let neg = g.neg(delta);
                for &(e, s) in &self.span.cycles[i] {
                    let before = flow[e];
                    let after = g.add(before, if s > 0 { delta } else { neg });
                    agree = agree + (after == h[e]) as usize - (before == h[e]) as usize;
                    flow[e] = after;
                }
                if new != 0 {
                    break;
                }
            }
        }
    }

    /// Depth-first version of `walk` restricted to flows satisfying `h`:
    /// a branch is cut as soon as a settled edge agrees with `h`. Visits the
    /// same flows in the same order as filtering `walk`.
    fn search(&self, h: &[Element], visit: &mut impl FnMut(&[Element]) -> bool) {
        if self.rigid.iter().any(|&e| h[e] == 0) {
            return;
        }
        let mut flow: EdgeVector = vec![0; self.graph.edge_count()];
        self.descend(0, h, &mut flow, visit);
    }

    fn descend(&self, depth: usize, h: &[Element], flow: &mut EdgeVector, visit: &mut impl FnMut(&[Element]) -> bool) -> bool {
        if depth == self.rank() {
            return visit(flow);
        }
        let g = &self.group;
        let cycle = &self.span.cycles[depth];
        let mut stop = false;
        let mut current = 0;
        for a in 0..g.order() as Element {
            self.shift(cycle, flow, g.sub(a, current));
            current = a;
            if self.settled[depth].iter().all(|&e| flow[e] != h[e]) && self.descend(depth + 1, h, flow, visit) {
                stop = true;
                break;
            }
        }
        self.shift(cycle, flow, g.neg(current));
        stop
    }

    #[inline]
    fn shift(&self, cycle: &[(EdgeId, i8)], flow: &mut [Element], delta: Element) {
        if delta == 0 {
            return;
        }
        let g = &self.group;
        let neg = g.neg(delta);
        for &(e, s) in cycle {
            flow[e] = g.add(flow[e], if s > 0 { delta } else { neg });
        }
    }

    /// The first flow (in enumeration order) differing from `h` on every edge.
    pub fn find_satisfying(&self, h: &[Element]) -> Result<Option<EdgeVector>> {
        check_len(&self.graph, h)?;
        let mut found = None;
        self.search(h, &mut |flow| {
            found = Some(flow.to_vec());
            true
        });
        Ok(found)
    }

    /// Number of flows satisfying `h`, stopping early once `cap` is reached.
    pub fn count_satisfying(&self, h: &[Element], cap: u64) -> Result<u64> {
        check_len(&self.graph, h)?;
        let mut count = 0;
        if cap == 0 {
            return Ok(0);
        }
        self.search(h, &mut |_| {
            count += 1;
            count >= cap
        });
        Ok(count)
    }

    /// Calls `f` on every flow; stops when it returns `true`.
    pub fn for_each_flow(&self, mut f: impl FnMut(&[Element]) -> bool) {
        let zeros = vec![0; self.graph.edge_count()];
        self.walk(&zeros, |flow, _| f(flow));
    }

    pub fn nowhere_zero_flow(&self) -> Option<EdgeVector> {
        let zeros = vec![0; self.graph.edge_count()];
        self.find_satisfying(&zeros).expect("sized")
    }
}

pub fn find_satisfying_flow(g: &Digraph, group: &Group, h: &[Element]) -> Result<Option<EdgeVector>> {
    FlowSpace::new(g, group).find_satisfying(h)
}

pub fn has_nowhere_zero_flow(g: &Digraph, group: &Group) -> Option<EdgeVector> {
    FlowSpace::new(g, group).nowhere_zero_flow()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn odometer(k: usize, len: usize) -> Vec<Vec<Element>> {
        let mut out = vec![vec![]];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|p| (0..k).map(move |x| [p.clone(), vec![x as Element]].concat()))
                .collect();
        }
        out
    }

    #[test]
    fn spanning_examples() {
        let tri = spanning_structure(&Digraph::cycle(3));
        assert_eq!(tri.tree_edges, vec![0, 1]);
        assert_eq!(tri.rank(), 1);
        assert_eq!(tri.cycles[0], vec![(2, 1), (0, 1), (1, 1)]);
        assert_eq!(spanning_structure(&Digraph::cube()).rank(), 5);
        assert_eq!(spanning_structure(&Digraph::path(5)).rank(), 0);
        let loopy = Digraph::new(2, vec![(0, 1), (1, 1)]).unwrap();
        assert_eq!(spanning_structure(&loopy).cycles, vec![vec![(1, 1)]]);
    }

    #[test]
    fn is_flow_examples() {
        let z4 = Group::z4();
        let tri = Digraph::cycle(3);
        assert!(is_flow(&tri, &z4, &[2, 2, 2]).unwrap());
        assert!(!is_flow(&tri, &z4, &[1, 0, 0]).unwrap());
        assert!(is_flow(&Digraph::cube(), &z4, &[0; 12]).unwrap());
        assert!(is_flow(&tri, &z4, &[1, 0]).is_err());
    }

    #[test]
    fn fundamental_cycles_are_flows() {
        let z4 = Group::z4();
        let g = Digraph::cube().reversed(3).reversed(7).with_edge(2, 2).unwrap().with_edge(5, 0).unwrap();
        let fs = FlowSpace::new(&g, &z4);
        for i in 0..fs.rank() {
            let mut a = vec![0; fs.rank()];
            a[i] = 1;
            let f = fs.flow_from_nontree(&a).unwrap();
            assert!(is_flow(&g, &z4, &f).unwrap());
            for (j, &e) in fs.spanning().nontree_edges.iter().enumerate() {
                assert_eq!(f[e], a[j]);
            }
        }
    }

    #[test]
    fn flow_from_nontree_examples() {
        let z4 = Group::z4();
        let fs = FlowSpace::new(&Digraph::cycle(3), &z4);
        assert_eq!(fs.flow_from_nontree(&[1]).unwrap(), vec![1, 1, 1]);
        assert_eq!(fs.flow_from_nontree(&[0]).unwrap(), vec![0, 0, 0]);
        assert!(fs.flow_from_nontree(&[0, 0]).is_err());

        let cube = FlowSpace::new(&Digraph::cube(), &z4);
        let a = [1, 2, 3, 0, 2];
        let f = cube.flow_from_nontree(&a).unwrap();
        assert!(is_flow(cube.graph(), &z4, &f).unwrap());
        let on_nontree: Vec<_> = cube.spanning().nontree_edges.iter().map(|&e| f[e]).collect();
        assert_eq!(on_nontree, a);
    }

    /// The image of `flow_from_nontree` is exactly the set of vectors that
    /// pass Kirchhoff, checked by brute force over all of Γ^E.
    #[test]
    fn flow_space_matches_kirchhoff_exhaustively() {
        let graphs = [
            Digraph::cycle(3),
            Digraph::complete(4),
            Digraph::new(2, vec![(0, 1), (1, 0), (0, 1), (0, 0)]).unwrap(),
            Digraph::new(4, vec![(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap(),
            Digraph::cycle(3).disjoint_union(&Digraph::cycle(2)),
        ];
        let groups = [Group::z4(), Group::z2_squared(), Group::cyclic(3).unwrap(), Group::cyclic(5).unwrap()];
        for g in &graphs {
            for gr in &groups {
                if (gr.order() as u64).pow(g.edge_count() as u32) > 300_000 {
                    continue;
                }
                let fs = FlowSpace::new(g, gr);
                let image: HashSet<EdgeVector> = odometer(gr.order(), fs.rank())
                    .iter()
                    .map(|a| fs.flow_from_nontree(a).unwrap())
                    .collect();
                let kirchhoff: HashSet<EdgeVector> = odometer(gr.order(), g.edge_count())
                    .into_iter()
                    .filter(|v| is_flow(g, gr, v).unwrap())
                    .collect();
                assert_eq!(image, kirchhoff, "{g:?} over {gr}");
                let mut walked = HashSet::new();
                fs.for_each_flow(|f| {
                    walked.insert(f.to_vec());
                    false
                });
                assert_eq!(walked, image);
            }
        }
    }

    #[test]
    fn satisfying_flow_examples() {
        let z4 = Group::z4();
        let c3 = Digraph::cycle(3);
        assert_eq!(find_satisfying_flow(&c3, &z4, &[0, 0, 0]).unwrap(), Some(vec![1, 1, 1]));
        assert_eq!(find_satisfying_flow(&Digraph::cycle(4), &z4, &[0, 1, 2, 3]).unwrap(), None);
        assert_eq!(find_satisfying_flow(&Digraph::path(4), &z4, &[0, 0, 0]).unwrap(), None);
        assert!(find_satisfying_flow(&c3, &z4, &[0, 0]).is_err());
    }

    #[test]
    fn nowhere_zero_examples() {
        let cube_flow = has_nowhere_zero_flow(&Digraph::cube(), &Group::z2_squared()).unwrap();
        assert!(cube_flow.iter().all(|&x| x != 0));
        assert!(is_flow(&Digraph::cube(), &Group::z2_squared(), &cube_flow).unwrap());
        assert!(has_nowhere_zero_flow(&Digraph::petersen(), &Group::z4()).is_none());
        assert!(has_nowhere_zero_flow(&Digraph::petersen(), &Group::z2_squared()).is_none());
        assert!(has_nowhere_zero_flow(&Digraph::petersen(), &Group::cyclic(5).unwrap()).is_some());
        let bridged = Digraph::cycle(3).disjoint_union(&Digraph::cycle(3)).with_edge(0, 3).unwrap();
        assert!(has_nowhere_zero_flow(&bridged, &Group::cyclic(5).unwrap()).is_none());
    }

    #[test]
    fn counting() {
        let z4 = Group::z4();
        let fs = FlowSpace::new(&Digraph::cycle(3), &z4);
        assert_eq!(fs.count_satisfying(&[0, 0, 0], u64::MAX).unwrap(), 3);
        assert_eq!(fs.count_satisfying(&[0, 1, 2], u64::MAX).unwrap(), 1);
        assert_eq!(fs.count_satisfying(&[0, 0, 0], 2).unwrap(), 2);
        assert_eq!(fs.size(), Some(4));
    }

    #[test]
    fn pruned_search_matches_plain_enumeration() {
        let graphs = [
            Digraph::cube(),
            Digraph::complete(4).subdivide(1, 2).unwrap(),
            Digraph::new(2, vec![(0, 0), (0, 1), (1, 0), (1, 1), (0, 1)]).unwrap(),
            Digraph::path(3).disjoint_union(&Digraph::cycle(3)),
        ];
        for g in &graphs {
            for group in [Group::z4(), Group::z2_squared(), Group::cyclic(3).unwrap()] {
                let fs = FlowSpace::new(g, &group);
                for seed in 0..40u64 {
                    let h: EdgeVector =
                        (0..g.edge_count()).map(|e| ((seed * 31 + e as u64 * seed * 7 + e as u64) % group.order() as u64) as Element).collect();
                    let mut first = None;
                    let mut count = 0;
                    fs.walk(&h, |flow, agree| {
                        if agree == 0 {
                            count += 1;
                            first.get_or_insert_with(|| flow.to_vec());
                        }
                        false
                    });
                    assert_eq!(fs.find_satisfying(&h).unwrap(), first);
                    assert_eq!(fs.count_satisfying(&h, u64::MAX).unwrap(), count);
                }
            }
        }
    }
}
