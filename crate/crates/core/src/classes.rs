//! The class function used by the marking algorithm.
//!
//! Forbidden mappings are grouped into classes that are constant under
//! adding flows and under exchanging the two forbidden values of a
//! once-subdivided edge (a thread of length two). Mappings that forbid the
//! same value twice on such a thread are dominated by ones that forbid two
//! distinct values and map to `None` (the throw-away class).
//!
//! A class key is the mixed-radix encoding of a tree-normalized mapping's
//! values on the spanning tree, one digit ("lane") per tree edge. Lanes are
//! ordered so that ordinary tree edges are least significant, then the tree
//! edge of every split thread, then both edges of every merged thread. The
//! spanning tree takes thread edges first, so most threads are merged: both
//! of their edges are tree edges and exchanging their values only permutes
//! their own two lanes. A thread whose two edges cannot both be in the tree
//! (its suppressed edge closes a cycle of threads) is split: it keeps the
//! throw-away rule but is not merged under exchange.

use crate::error::{Error, Result};
use crate::flows::{check_len, spanning_structure_with_priority, EdgeVector, SpanningStructure};
use crate::graph::{thread_profile, Digraph, EdgeId, ThreadProfile};
use crate::group::{Element, Group};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassKey(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassOptions {
    /// Apply the throw-away and exchange rules to threads of length two.
    pub merge_threads: bool,
}

impl Default for ClassOptions {
    fn default() -> Self {
        ClassOptions { merge_threads: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    /// Both edges are tree edges, with lanes `lanes[0] < lanes[1]`.
    Merged { lanes: [usize; 2] },
    /// Only `edges[tree]` is a tree edge.
    Split { tree: usize, lane: usize },
}

/// A thread of length two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairThread {
    pub edges: [EdgeId; 2],
    pub signs: [i8; 2],
    pub kind: PairKind,
}

#[derive(Debug, Clone)]
pub struct ClassFunction {
    graph: Digraph,
    group: Group,
    span: SpanningStructure,
    profile: ThreadProfile,
    pub(crate) pairs: Vec<PairThread>,
    /// Lane of each tree edge.
    pub(crate) lane_of: Vec<Option<usize>>,
    pub(crate) lane_edges: Vec<EdgeId>,
    /// Number of least-significant lanes not owned by any pair thread.
    pub(crate) free_lanes: usize,
    pub(crate) codec: LaneCodec,
}

impl ClassFunction {
    pub fn new(graph: &Digraph, group: &Group, options: ClassOptions) -> Result<Self> {
        let profile = thread_profile(graph);
        let pair_threads: Vec<usize> = if options.merge_threads {
            (0..profile.threads.len()).filter(|&i| profile.threads[i].len() == 2).collect()
        } else {
            Vec::new()
        };
        let priority: Vec<EdgeId> =
            pair_threads.iter().flat_map(|&i| profile.threads[i].edges.iter().copied()).collect();
        let span = spanning_structure_with_priority(graph, &priority);

        let mut in_pair = vec![false; graph.edge_count()];
        for &i in &pair_threads {
            for &e in &profile.threads[i].edges {
                in_pair[e] = true;
            }
        }
        let mut lane_edges: Vec<EdgeId> = span.tree_edges.iter().copied().filter(|&e| !in_pair[e]).collect();
        let free_lanes = lane_edges.len();

        let mut split = Vec::new();
        let mut merged = Vec::new();
        for &i in &pair_threads {
            let t = &profile.threads[i];
            let edges = [t.edges[0], t.edges[1]];
            let signs = [t.signs[0], t.signs[1]];
            match (span.in_tree[edges[0]], span.in_tree[edges[1]]) {
                (true, true) => merged.push((edges, signs)),
                (true, false) => split.push((edges, signs, 0)),
                (false, true) => split.push((edges, signs, 1)),
                (false, false) => unreachable!("internal thread vertex must be spanned"),
            }
        }
        let mut pairs = Vec::new();
        for (edges, signs, tree) in split {
            pairs.push(PairThread { edges, signs, kind: PairKind::Split { tree, lane: lane_edges.len() } });
            lane_edges.push(edges[tree]);
        }
        for (edges, signs) in merged {
            let l = lane_edges.len();
            pairs.push(PairThread { edges, signs, kind: PairKind::Merged { lanes: [l, l + 1] } });
            lane_edges.extend(edges);
        }

        let mut lane_of = vec![None; graph.edge_count()];
        for (l, &e) in lane_edges.iter().enumerate() {
            lane_of[e] = Some(l);
        }
        let codec = LaneCodec::new(group, lane_edges.len())?;
        Ok(ClassFunction {
            graph: graph.clone(),
            group: group.clone(),
            span,
            profile,
            pairs,
            lane_of,
            lane_edges,
            free_lanes,
            codec,
        })
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

    pub fn profile(&self) -> &ThreadProfile {
        &self.profile
    }

    pub fn pairs(&self) -> &[PairThread] {
        &self.pairs
    }

    pub fn lane_count(&self) -> usize {
        self.lane_edges.len()
    }

    /// `|Γ|^(tree edges)`, which is `|Γ|^(n-1)` on a connected graph.
    pub fn key_space(&self) -> u64 {
        self.codec.space
    }

    /// Subtracts the flow that agrees with `h` on the non-tree edges; the
    /// result vanishes off the tree and is flow-equivalent to `h`.
    pub fn tree_normalize(&self, h: &[Element]) -> Result<EdgeVector> {
        check_len(&self.graph, h)?;
        let g = &self.group;
        let mut out = h.to_vec();
        for (cycle, &f) in self.span.cycles.iter().zip(&self.span.nontree_edges) {
            let a = h[f];
            if a == 0 {
                continue;
            }
            for &(e, s) in cycle {
                out[e] = g.sub(out[e], g.signed(s, a));
            }
        }
        Ok(out)
    }

    fn digits_of(&self, normalized: &[Element]) -> Vec<Element> {
        self.lane_edges.iter().map(|&e| normalized[e]).collect()
    }

    /// Key of the tree-normalized mapping, before any exchange.
    pub fn raw_key(&self, h: &[Element]) -> Result<ClassKey> {
        let n = self.tree_normalize(h)?;
        Ok(ClassKey(self.codec.encode(&self.digits_of(&n))))
    }

    /// The class of `h`, or `None` for the throw-away class.
    pub fn classify(&self, h: &[Element]) -> Result<Option<ClassKey>> {
        check_len(&self.graph, h)?;
        let g = &self.group;
        for p in &self.pairs {
            if g.signed(p.signs[0], h[p.edges[0]]) == g.signed(p.signs[1], h[p.edges[1]]) {
                return Ok(None);
            }
        }
        let mut digits = self.digits_of(&self.tree_normalize(h)?);
        for p in &self.pairs {
            if let PairKind::Merged { lanes: [la, lb] } = p.kind {
                let (da, db) = self.exchanged(p, digits[la], digits[lb]);
                if db < digits[lb] {
                    digits[la] = da;
                    digits[lb] = db;
                }
            }
        }
        Ok(Some(ClassKey(self.codec.encode(&digits))))
    }

    /// Lane digits of a merged thread after exchanging its two values.
    pub(crate) fn exchanged(&self, p: &PairThread, da: Element, db: Element) -> (Element, Element) {
        let g = &self.group;
        let (s1, s2) = (p.signs[0], p.signs[1]);
        let b1 = g.signed(s1, da);
        let b2 = g.signed(s2, db);
        (g.signed(s1, b2), g.signed(s2, b1))
    }

    /// True for keys that are their own class: no thread repeats a value and
    /// every merged thread sits in its lexicographically smaller order.
    pub fn is_canonical(&self, key: ClassKey) -> bool {
        let digits = self.codec.decode(key.0);
        let g = &self.group;
        self.pairs.iter().all(|p| match p.kind {
            PairKind::Split { lane, .. } => digits[lane] != 0,
            PairKind::Merged { lanes: [la, lb] } => {
                g.signed(p.signs[0], digits[la]) != g.signed(p.signs[1], digits[lb])
                    && digits[lb] < self.exchanged(p, digits[la], digits[lb]).1
            }
        })
    }

    /// The mapping equal to the key's digits on tree edges and zero elsewhere.
    pub fn representative(&self, key: ClassKey) -> Result<EdgeVector> {
        if key.0 >= self.codec.space {
            return Err(Error::KeyOutOfRange { key: key.0, space: self.codec.space });
        }
        let mut h = vec![0; self.graph.edge_count()];
        for (d, &e) in self.codec.decode(key.0).into_iter().zip(&self.lane_edges) {
            h[e] = d;
        }
        Ok(h)
    }

    /// Exchanges the forbidden values of pair thread `i` (sign-normalized).
    pub fn exchange(&self, h: &[Element], i: usize) -> EdgeVector {
        let g = &self.group;
        let p = &self.pairs[i];
        let a1 = g.signed(p.signs[0], h[p.edges[0]]);
        let a2 = g.signed(p.signs[1], h[p.edges[1]]);
        let mut out = h.to_vec();
        out[p.edges[0]] = g.signed(p.signs[0], a2);
        out[p.edges[1]] = g.signed(p.signs[1], a1);
        out
    }

    pub fn merged_count(&self) -> usize {
        self.pairs.iter().filter(|p| matches!(p.kind, PairKind::Merged { .. })).count()
    }

    pub fn split_count(&self) -> usize {
        self.pairs.len() - self.merged_count()
    }

    /// Number of canonical non-throw-away keys, in closed form.
    pub fn canonical_count(&self) -> u64 {
        let k = self.group.order() as u64;
        let mut c = k.pow(self.free_lanes as u32);
        c *= (k - 1).pow(self.split_count() as u32);
        c *= (k * (k - 1) / 2).pow(self.merged_count() as u32);
        c
    }

    /// Number of keys whose digits already repeat a value on some thread.
    pub fn null_key_count(&self) -> u64 {
        let k = self.group.order() as u64;
        let non_null = k.pow(self.free_lanes as u32)
            * (k - 1).pow(self.split_count() as u32)
            * (k * (k - 1)).pow(self.merged_count() as u32);
        self.codec.space - non_null
    }

    /// `(total keys, canonical non-throw-away keys)` by sweeping every key
    /// through `classify`.
    pub fn count_classes(&self) -> (u64, u64) {
        let mut canonical = 0;
        for key in 0..self.codec.space {
            let h = self.representative(ClassKey(key)).expect("in range");
            if self.classify(&h).expect("sized") == Some(ClassKey(key)) {
                canonical += 1;
            }
        }
        (self.codec.space, canonical)
    }
}

/// Packs lane digits into a `u64`, `bits` bits per lane, lane 0 lowest.
#[derive(Debug, Clone)]
pub(crate) struct LaneCodec {
    pub k: u64,
    pub bits: u32,
    pub lanes: usize,
    pub space: u64,
    pub two_group: bool,
    /// For two-groups: the top bit of every factor's field in every lane.
    pub high: u64,
    group: Group,
}

impl LaneCodec {
    fn new(group: &Group, lanes: usize) -> Result<Self> {
        let k = group.order() as u64;
        let bits = (usize::BITS - (group.order() - 1).leading_zeros()).max(1);
        let space = k
            .checked_pow(lanes as u32)
            .filter(|_| bits as usize * lanes <= 64)
            .ok_or_else(|| Error::Budget(format!("key space {k}^{lanes} does not fit in 64 bits")))?;
        let two_group = group.is_two_group();
        let mut lane_high = 0u64;
        if two_group {
            let mut offset = 0;
            for &f in group.factors() {
                let w = f.trailing_zeros();
                lane_high |= 1 << (offset + w - 1);
                offset += w;
            }
        }
        let high = (0..lanes).fold(0u64, |acc, l| acc | (lane_high << (l as u32 * bits)));
        Ok(LaneCodec { k, bits, lanes, space, two_group, high, group: group.clone() })
    }

    #[inline]
    pub fn lane(&self, packed: u64, lane: usize) -> Element {
        ((packed >> (lane as u32 * self.bits)) & ((1 << self.bits) - 1)) as Element
    }

    #[inline]
    pub fn put(&self, lane: usize, d: Element) -> u64 {
        (d as u64) << (lane as u32 * self.bits)
    }

    /// Lane-wise group addition.
    #[inline]
    pub fn add(&self, x: u64, y: u64) -> u64 {
        if self.two_group {
            ((x & !self.high) + (y & !self.high)) ^ ((x ^ y) & self.high)
        } else {
            (0..self.lanes).fold(0, |acc, l| acc | self.put(l, self.group.add(self.lane(x, l), self.lane(y, l))))
        }
    }

    /// Mixed-radix key index of a packed lane vector.
    #[inline]
    pub fn index(&self, packed: u64) -> u64 {
        if self.two_group {
            packed
        } else {
            (0..self.lanes).rev().fold(0, |acc, l| acc * self.k + self.lane(packed, l) as u64)
        }
    }

    pub fn pack(&self, digits: &[Element]) -> u64 {
        digits.iter().enumerate().fold(0, |acc, (l, &d)| acc | self.put(l, d))
    }

    pub fn encode(&self, digits: &[Element]) -> u64 {
        self.index(self.pack(digits))
    }

    pub fn decode(&self, mut key: u64) -> Vec<Element> {
        (0..self.lanes)
            .map(|_| {
                let d = (key % self.k) as Element;
                key /= self.k;
                d
            })
            .collect()
    }
}
