use std::sync::atomic::{AtomicU64, Ordering};

use crate::classes::{ClassFunction, ClassKey, ClassOptions, LaneCodec, PairKind};
use crate::error::{Error, Result};
use crate::flows::FlowSpace;
use crate::graph::Digraph;
use crate::group::{Element, Group};

use super::{Stats, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FastOptions {
    /// Merge once-subdivided edges (exchange and throw-away rules).
    pub merge_threads: bool,
    pub workers: usize,
    /// Largest marking table, as a power of two in bits.
    pub max_table_bits: u32,
}

impl Default for FastOptions {
    fn default() -> Self {
        FastOptions { merge_threads: true, workers: 1, max_table_bits: 32 }
    }
}

/// Lane-wise addition on packed keys and conversion to a table index.
trait Arith: Sync {
    fn add(&self, x: u64, y: u64) -> u64;
    fn index(&self, x: u64) -> u64;
}

/// Two-groups: lanes are bit fields and the packed word is the index.
struct Swar {
    high: u64,
}

impl Arith for Swar {
    #[inline(always)]
    fn add(&self, x: u64, y: u64) -> u64 {
        ((x & !self.high) + (y & !self.high)) ^ ((x ^ y) & self.high)
    }

    #[inline(always)]
    fn index(&self, x: u64) -> u64 {
        x
    }
}

struct Tabled<'a> {
    codec: &'a LaneCodec,
}

impl Arith for Tabled<'_> {
    #[inline]
    fn add(&self, x: u64, y: u64) -> u64 {
        self.codec.add(x, y)
    }

    #[inline]
    fn index(&self, x: u64) -> u64 {
        self.codec.index(x)
    }
}

/// One enumeration level.
enum Level {
    /// Packed contributions of every choice for one edge or split thread.
    /// `tree` marks ordinary tree edges, which touch only their own lane.
    Choices { choices: Vec<u64>, tree: bool },
    /// A merged thread: the choices depend on the offset already present in
    /// its first lane, and each unordered pair is added in the order that
    /// makes the resulting key canonical.
    Merged { shift: u32, by_offset: Vec<Vec<u64>> },
}

impl Level {
    fn width(&self) -> usize {
        match self {
            Level::Choices { choices, .. } => choices.len(),
            Level::Merged { by_offset, .. } => by_offset[0].len(),
        }
    }
}

/// Cap on the choices folded into either part of the innermost level.
const TAIL_CHOICES: usize = 96;
/// Cap on the offset combinations read by the innermost level.
const TAIL_OFFSETS: usize = 1 << 8;

/// The innermost levels folded together: trailing merged threads, whose
/// combined choices are selected by their offsets, and the ordinary tree
/// edges before them, whose choices are fixed.
struct Tail {
    shifts: Vec<u32>,
    mask: u64,
    k: u64,
    merged: Vec<Vec<u64>>,
    fixed: Vec<u64>,
}

impl Tail {
    #[inline(always)]
    fn merged(&self, acc: u64) -> &[u64] {
        let i = self.shifts.iter().rev().fold(0, |i, &s| i * self.k + ((acc >> s) & self.mask));
        &self.merged[i as usize]
    }
}

struct Plan {
    levels: Vec<Level>,
    tail: Tail,
}

impl Plan {
    fn new(cf: &ClassFunction) -> Plan {
        let g = cf.group();
        let codec = &cf.codec;
        let span = cf.spanning();
        let nonzero: Vec<Element> = g.nonzero().collect();
        let mut in_pair = vec![false; cf.graph().edge_count()];
        for p in cf.pairs() {
            in_pair[p.edges[0]] = true;
            in_pair[p.edges[1]] = true;
        }
        let mut cycle_of = vec![None; cf.graph().edge_count()];
        for (i, &f) in span.nontree_edges.iter().enumerate() {
            cycle_of[f] = Some(i);
        }
        // Packed tree-normalization of the mapping that is `a` on `e` only.
        let contribution = |e: usize, a: Element| -> u64 {
            match cf.lane_of[e] {
                Some(l) => codec.put(l, a),
                None => span.cycles[cycle_of[e].expect("non-tree edge")]
                    .iter()
                    .filter_map(|&(t, s)| cf.lane_of[t].map(|l| codec.put(l, g.signed(-s, a))))
                    .fold(0, |acc, x| codec.add(acc, x)),
            }
        };

        let mut levels = Vec::new();
        for &f in &span.nontree_edges {
            if !in_pair[f] {
                levels.push(Level::Choices { choices: nonzero.iter().map(|&a| contribution(f, a)).collect(), tree: false });
            }
        }
        for p in cf.pairs() {
            if let PairKind::Split { .. } = p.kind {
                let mut choices = Vec::new();
                for &x in &nonzero {
                    for &y in &nonzero {
                        if x != y {
                            let c0 = contribution(p.edges[0], g.signed(p.signs[0], x));
                            let c1 = contribution(p.edges[1], g.signed(p.signs[1], y));
                            choices.push(codec.add(c0, c1));
                        }
                    }
                }
                levels.push(Level::Choices { choices, tree: false });
            }
        }
        for &e in &span.tree_edges {
            if !in_pair[e] {
                levels.push(Level::Choices { choices: nonzero.iter().map(|&a| contribution(e, a)).collect(), tree: true });
            }
        }
        for p in cf.pairs() {
            if let PairKind::Merged { lanes: [la, lb] } = p.kind {
                let (s0, s1) = (p.signs[0], p.signs[1]);
                let by_offset = g
                    .elements()
                    .map(|d| {
                        let x = g.signed(s0, d);
                        let mut choices = Vec::new();
                        for (i, &a) in nonzero.iter().enumerate() {
                            for &b in &nonzero[i + 1..] {
                                // Final second-lane digit for each order.
                                let keep = g.signed(s1, g.add(x, b));
                                let swap = g.signed(s1, g.add(x, a));
                                let (first, second) = if keep < swap { (a, b) } else { (b, a) };
                                choices.push(codec.put(la, g.signed(s0, first)) | codec.put(lb, g.signed(s1, second)));
                            }
                        }
                        choices
                    })
                    .collect();
                levels.push(Level::Merged { shift: la as u32 * codec.bits, by_offset });
            }
        }
        let tail = Self::split_tail(&mut levels, codec, g.order());
        Plan { levels, tail }
    }

    fn split_tail(levels: &mut Vec<Level>, codec: &LaneCodec, k: usize) -> Tail {
        let mut merged_run = Vec::new();
        let (mut width, mut offsets) = (1, 1);
        while let Some(Level::Merged { .. }) = levels.last() {
            let w = levels.last().expect("nonempty").width();
            if width * w > TAIL_CHOICES || offsets * k > TAIL_OFFSETS {
                break;
            }
            width *= w;
            offsets *= k;
            merged_run.push(levels.pop().expect("nonempty"));
        }
        merged_run.reverse();
        let mut fixed_run = Vec::new();
        if !matches!(levels.last(), Some(Level::Merged { .. })) {
            let mut width = 1;
            while let Some(Level::Choices { tree: true, choices }) = levels.last() {
                if width * choices.len() > TAIL_CHOICES {
                    break;
                }
                width *= choices.len();
                fixed_run.push(levels.pop().expect("nonempty"));
            }
        }
        let sums = |lists: Vec<&[u64]>| {
            lists.into_iter().fold(vec![0u64], |acc, list| {
                acc.iter().flat_map(|&s| list.iter().map(move |&c| codec.add(s, c))).collect()
            })
        };
        let mut fixed = sums(
            fixed_run
                .iter()
                .map(|l| match l {
                    Level::Choices { choices, .. } => choices.as_slice(),
                    Level::Merged { .. } => unreachable!(),
                })
                .collect(),
        );
        // Consecutive marks should land in different table words, otherwise
        // each read-modify-write waits for the previous one.
        fixed.sort_by_key(|&c| (c & 63, c >> 6));
        let kk = k as u64;
        let merged = (0..kk.pow(merged_run.len() as u32))
            .map(|combo| {
                // Combination index holds one offset digit per merged level.
                sums(
                    merged_run
                        .iter()
                        .enumerate()
                        .map(|(j, l)| match l {
                            Level::Merged { by_offset, .. } => by_offset[(combo / kk.pow(j as u32) % kk) as usize].as_slice(),
                            Level::Choices { .. } => unreachable!(),
                        })
                        .collect(),
                )
            })
            .collect();
        let shifts = merged_run
            .iter()
            .map(|l| match l {
                Level::Merged { shift, .. } => *shift,
                Level::Choices { .. } => unreachable!(),
            })
            .collect();
        Tail { shifts, mask: (1 << codec.bits) - 1, k: kk, merged, fixed }
    }

    fn choices(&self, depth: usize, acc: u64) -> &[u64] {
        match &self.levels[depth] {
            Level::Choices { choices, .. } => choices,
            Level::Merged { shift, by_offset } => &by_offset[((acc >> shift) & self.tail.mask) as usize],
        }
    }

    /// Number of leaves, i.e. enumerated forbidden mappings.
    fn leaves(&self) -> u64 {
        let outer: u64 = self.levels.iter().map(|l| l.width() as u64).product();
        outer * self.tail.merged[0].len() as u64 * self.tail.fixed.len() as u64
    }

    fn run<A: Arith>(&self, arith: &A, depth: usize, acc: u64, mark: &mut impl FnMut(u64)) {
        if depth == self.levels.len() {
            for &m in self.tail.merged(acc) {
                let acc = arith.add(acc, m);
                for &c in &self.tail.fixed {
                    mark(arith.index(arith.add(acc, c)));
                }
            }
        } else {
            for &c in self.choices(depth, acc) {
                self.run(arith, depth + 1, arith.add(acc, c), mark);
            }
        }
    }

    fn fill<A: Arith>(&self, arith: &A, space: u64, workers: usize) -> Vec<u64> {
        let words = space.div_ceil(64) as usize;
        if workers <= 1 || self.levels.is_empty() {
            let mut table = vec![0u64; words];
            self.run(arith, 0, 0, &mut |i| table[(i >> 6) as usize] |= 1 << (i & 63));
            return table;
        }
        let table: Vec<AtomicU64> = (0..words).map(|_| AtomicU64::new(0)).collect();
        let first = self.choices(0, 0);
        std::thread::scope(|scope| {
            for w in 0..workers {
                let table = &table;
                scope.spawn(move || {
                    let mut mark = |i: u64| {
                        table[(i >> 6) as usize].fetch_or(1 << (i & 63), Ordering::Relaxed);
                    };
                    for &c in first.iter().skip(w).step_by(workers) {
                        self.run(arith, 1, arith.add(0, c), &mut mark);
                    }
                });
            }
        });
        table.into_iter().map(AtomicU64::into_inner).collect()
    }
}

/// First index in `lo..hi` whose bit is clear.
fn first_clear(table: &[u64], lo: u64, hi: u64) -> Option<u64> {
    let mut i = lo;
    while i < hi {
        let word = (i >> 6) as usize;
        let offset = i & 63;
        let span = (64 - offset).min(hi - i);
        let mask = if span == 64 { u64::MAX } else { ((1u64 << span) - 1) << offset };
        let missing = !table[word] & mask;
        if missing != 0 {
            return Some(((word as u64) << 6) | missing.trailing_zeros() as u64);
        }
        i += span;
    }
    None
}

/// Visits canonical keys block by block: the free lanes form the low digits
/// and take every value, so each combination of pair-thread digits owns one
/// contiguous run of indices.
fn sweep(cf: &ClassFunction, table: &[u64]) -> Option<ClassKey> {
    let g = cf.group();
    let k = g.order() as u64;
    let block = k.pow(cf.free_lanes as u32);
    // Each slot lists the index contributions of its allowed digit tuples.
    let mut slots: Vec<Vec<u64>> = Vec::new();
    for p in cf.pairs() {
        if let PairKind::Split { lane, .. } = p.kind {
            let scale = k.pow(lane as u32);
            slots.push(g.nonzero().map(|d| d as u64 * scale).collect());
        }
    }
    for p in cf.pairs() {
        if let PairKind::Merged { lanes: [la, lb] } = p.kind {
            let mut values = Vec::new();
            for da in g.elements() {
                for db in g.elements() {
                    let distinct = g.signed(p.signs[0], da) != g.signed(p.signs[1], db);
                    if distinct && db < cf.exchanged(p, da, db).1 {
                        values.push(da as u64 * k.pow(la as u32) + db as u64 * k.pow(lb as u32));
                    }
                }
            }
            slots.push(values);
        }
    }
    let mut pos = vec![0usize; slots.len()];
    loop {
        let base: u64 = slots.iter().zip(&pos).map(|(s, &i)| s[i]).sum();
        if let Some(i) = first_clear(table, base, base + block) {
            return Some(ClassKey(i));
        }
        let mut j = slots.len();
        loop {
            if j == 0 {
                return None;
            }
            j -= 1;
            pos[j] += 1;
            if pos[j] < slots[j].len() {
                break;
            }
            pos[j] = 0;
        }
    }
}

/// Marks the class of every forbidden mapping avoided by the zero flow and
/// reports NO with a representative of the first canonical class that was
/// never marked.
pub fn solve_fast(g: &Digraph, group: &Group, options: &FastOptions) -> Result<Verdict> {
    let cf = ClassFunction::new(g, group, ClassOptions { merge_threads: options.merge_threads })?;
    let space = cf.key_space();
    if space > 1u64 << options.max_table_bits.min(63) {
        return Err(Error::Budget(format!("marking table of {space} bits exceeds 2^{}", options.max_table_bits)));
    }
    let plan = Plan::new(&cf);
    let table = if cf.codec.two_group {
        plan.fill(&Swar { high: cf.codec.high }, space, options.workers)
    } else {
        plan.fill(&Tabled { codec: &cf.codec }, space, options.workers)
    };
    let stats = Stats {
        classes_total: space,
        classes_null: cf.null_key_count(),
        classes_canonical: cf.canonical_count(),
        mappings_enumerated: plan.leaves(),
        ..Stats::default()
    };
    match sweep(&cf, &table) {
        None => Ok(Verdict::yes("fast", stats)),
        Some(key) => {
            let h = cf.representative(key)?;
            let mut stats = stats;
            stats.flow_searches = 1;
            if FlowSpace::new(g, group).find_satisfying(&h)?.is_some() {
                return Err(Error::Internal(format!("unmarked class {} has a satisfying flow", key.0)));
            }
            Ok(Verdict::no("fast", h, stats))
        }
    }
}
