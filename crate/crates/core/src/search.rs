//! Search for graphs on which two groups of the same order disagree.
//!
//! Every base graph is subdivided in all ways that add a given number of
//! vertices. Both groups are screened for a cheap NO certificate first; a
//! full decision runs only for the group that did not screen NO, and a
//! witness is emitted when it comes back YES.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;
use std::time::Instant;

use crossbeam_channel::{bounded, unbounded};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flows::{has_nowhere_zero_flow, FlowSpace};
use crate::graph::{parse_graph6, Digraph, EdgeId};
use crate::group::Group;
use crate::solver::{
    certificate_entries, decide, screen, solve_naive, verify_certificate, Algorithm, CertificateEntry, DecideOptions,
    ScreenOptions,
};

/// Subdivision counts as `(edge, count)` pairs with increasing edges.
pub type Subdivision = Vec<(EdgeId, usize)>;

/// All multisets of `added` edges out of `m`, each edge used at most
/// `max_per_edge` times, in lexicographic order of the sorted multiset.
pub fn subdivision_plans(m: usize, added: usize, max_per_edge: Option<usize>) -> Vec<Subdivision> {
    let cap = max_per_edge.unwrap_or(added);
    let mut out = Vec::new();
    let mut chosen: Vec<EdgeId> = Vec::new();
    fn rec(m: usize, left: usize, cap: usize, from: usize, chosen: &mut Vec<EdgeId>, out: &mut Vec<Subdivision>) {
        if left == 0 {
            let mut plan: Subdivision = Vec::new();
            for &e in chosen.iter() {
                match plan.last_mut() {
                    Some((last, c)) if *last == e => *c += 1,
                    _ => plan.push((e, 1)),
                }
            }
            out.push(plan);
            return;
        }
        for e in from..m {
            let used = chosen.iter().rev().take_while(|&&x| x == e).count();
            if used >= cap {
                continue;
            }
            chosen.push(e);
            rec(m, left - 1, cap, e, chosen, out);
            chosen.pop();
        }
    }
    if m > 0 || added == 0 {
        rec(m, added, cap, 0, &mut chosen, &mut out);
    }
    out
}

pub fn apply_subdivision(base: &Digraph, plan: &[(EdgeId, usize)]) -> Result<Digraph> {
    let mut counts = vec![0; base.edge_count()];
    for &(e, c) in plan {
        *counts.get_mut(e).ok_or(Error::UnknownEdge(e))? += c;
    }
    base.subdivide_all(&counts)
}

/// Every subdivision of `base` with `added` new vertices.
pub fn enumerate_subdivisions(base: &Digraph, added: usize, max_per_edge: Option<usize>) -> Vec<(Subdivision, Digraph)> {
    subdivision_plans(base.edge_count(), added, max_per_edge)
        .into_iter()
        .map(|plan| {
            let g = apply_subdivision(base, &plan).expect("plan within edge range");
            (plan, g)
        })
        .collect()
}

/// Bases without a nowhere-zero flow are NO for every group of that order.
pub fn prefilter(g: &Digraph, group: &Group) -> bool {
    has_nowhere_zero_flow(g, group).is_some()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchOrder {
    Sequential,
    Random(u64),
}

impl FromStr for SearchOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sequential" => Ok(SearchOrder::Sequential),
            "random" => Ok(SearchOrder::Random(0)),
            _ => Err(Error::Precondition(format!("unknown order {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub groups: (Group, Group),
    /// Numbers of added vertices to try, in order.
    pub added: Vec<usize>,
    pub max_per_edge: Option<usize>,
    pub order: SearchOrder,
    pub workers: usize,
    pub screen: ScreenOptions,
    /// Also run full decisions when neither group screens NO.
    pub exhaustive: bool,
    /// Where a previous run stopped.
    pub resume: Option<Checkpoint>,
}

impl SearchConfig {
    pub fn new(groups: (Group, Group), added: Vec<usize>) -> Self {
        SearchConfig {
            groups,
            added,
            max_per_edge: None,
            order: SearchOrder::Sequential,
            workers: 1,
            screen: ScreenOptions::default(),
            exhaustive: false,
            resume: None,
        }
    }
}

/// A base graph and its line number in the input (starting at 1).
#[derive(Debug, Clone)]
pub struct Base {
    pub line: usize,
    pub graph6: String,
    pub graph: Digraph,
}

/// Parses a graph6 corpus, skipping blank lines.
pub fn parse_bases(text: &str) -> Result<Vec<Base>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let graph6 = l.trim().to_string();
            let graph = parse_graph6(&graph6).map_err(|e| Error::Graph6(format!("line {}: {e}", i + 1)))?;
            Ok(Base { line: i + 1, graph6, graph })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// The subdivided graph in edge-list format.
    pub graph: String,
    pub n: usize,
    pub m: usize,
    pub base_line: usize,
    pub base_graph6: String,
    pub subdivisions: Subdivision,
    pub connected_group: String,
    pub disconnected_group: String,
    /// Certificate for `disconnected_group`.
    pub certificate: Vec<CertificateEntry>,
    pub elapsed_ms: f64,
}

/// What happened to one task.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    /// The base has no nowhere-zero flow.
    Filtered,
    BothNo,
    /// Neither group screened NO and no full decision was made.
    Unscreened,
    /// Decided, with equal verdicts.
    Agree(bool),
    Witness(Box<Witness>),
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskReport {
    /// Index in processing order.
    pub position: usize,
    pub base_line: usize,
    /// Index of the subdivision within its base.
    pub rank: usize,
    pub outcome: Outcome,
}

impl TaskReport {
    /// Checkpoint marking this task and all earlier ones as done.
    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint { completed: self.position + 1, base_line: self.base_line, rank: self.rank }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SearchSummary {
    pub tasks: usize,
    pub processed: usize,
    pub filtered: usize,
    pub both_no: usize,
    pub unscreened: usize,
    pub agree: usize,
    pub witnesses: usize,
    pub failed: usize,
}

/// Position of the last task in an unbroken run of completed tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Checkpoint {
    /// Tasks completed, counted in processing order.
    pub completed: usize,
    pub base_line: usize,
    pub rank: usize,
}

impl fmt::Display for Checkpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "completed {}", self.completed)?;
        writeln!(f, "base {}", self.base_line)?;
        writeln!(f, "rank {}", self.rank)
    }
}

impl FromStr for Checkpoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut fields = BTreeMap::new();
        for line in s.lines().filter(|l| !l.trim().is_empty()) {
            let mut parts = line.split_whitespace();
            let (Some(key), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Precondition(format!("bad checkpoint line {line:?}")));
            };
            let value: usize = value.parse().map_err(|_| Error::Precondition(format!("bad checkpoint value {value:?}")))?;
            fields.insert(key.to_string(), value);
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| Error::Precondition(format!("checkpoint lacks {k}")));
        Ok(Checkpoint { completed: get("completed")?, base_line: get("base")?, rank: get("rank")? })
    }
}

struct Task {
    position: usize,
    base: usize,
    rank: usize,
}

fn fast_options() -> DecideOptions {
    DecideOptions::with_algorithm(Algorithm::Fast)
}

/// Largest flow-space rank for the naive cross-check.
pub const CROSS_CHECK_RANK: usize = 6;
/// Largest number of naive representatives, `|Γ|^(n-1)`, for the cross-check.
pub const CROSS_CHECK_MAPPINGS: u64 = 1 << 20;

/// Full decision by the fast solver, cross-checked against the naive
/// solver when both the flow space and the naive enumeration are small.
fn confirmed(g: &Digraph, group: &Group) -> Result<bool> {
    let v = decide(g, group, &fast_options())?;
    let mappings = (group.order() as u64).checked_pow(g.vertex_count().saturating_sub(1) as u32);
    let small = FlowSpace::new(g, group).rank() <= CROSS_CHECK_RANK && mappings.is_some_and(|c| c <= CROSS_CHECK_MAPPINGS);
    if small && solve_naive(g, group)?.connected != v.connected {
        return Err(Error::Internal(format!("fast and naive solvers disagree over {group}")));
    }
    Ok(v.connected)
}

fn run_task(base: &Base, plan: &[(EdgeId, usize)], config: &SearchConfig, filtered: bool) -> Result<Outcome> {
    if filtered {
        return Ok(Outcome::Filtered);
    }
    let start = Instant::now();
    let g = apply_subdivision(&base.graph, plan)?;
    let (g1, g2) = (&config.groups.0, &config.groups.1);
    let s1 = screen(&g, g1, &config.screen)?;
    let s2 = screen(&g, g2, &config.screen)?;
    let (yes, no) = match (&s1, &s2) {
        (Some(_), Some(_)) => return Ok(Outcome::BothNo),
        (Some(_), None) => (g2, g1),
        (None, Some(_)) => (g1, g2),
        (None, None) if !config.exhaustive => return Ok(Outcome::Unscreened),
        (None, None) => {
            let (c1, c2) = (confirmed(&g, g1)?, confirmed(&g, g2)?);
            if c1 == c2 {
                return Ok(Outcome::Agree(c1));
            }
            if c1 {
                (g1, g2)
            } else {
                (g2, g1)
            }
        }
    };
    if !confirmed(&g, yes)? {
        return Ok(Outcome::Agree(false));
    }
    let verdict = decide(&g, no, &fast_options())?;
    let certificate = match verdict.certificate {
        Some(h) if verify_certificate(&g, no, &h)? => h,
        _ => return Err(Error::Internal(format!("{no} NO verdict without a valid certificate"))),
    };
    Ok(Outcome::Witness(Box::new(Witness {
        graph: g.to_edgelist(),
        n: g.vertex_count(),
        m: g.edge_count(),
        base_line: base.line,
        base_graph6: base.graph6.clone(),
        subdivisions: plan.to_vec(),
        connected_group: yes.name(),
        disconnected_group: no.name(),
        certificate: certificate_entries(&g, no, &certificate)?,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })))
}

/// Runs the search and hands every task report to `sink` in processing
/// order. `sink` returns `false` to stop early.
pub fn discrepancy_search(
    bases: &[Base],
    config: &SearchConfig,
    mut sink: impl FnMut(&TaskReport) -> bool,
) -> Result<SearchSummary> {
    if config.groups.0.order() != config.groups.1.order() {
        return Err(Error::Precondition("groups must have the same order".into()));
    }
    // Plans depend only on the edge count.
    let mut plans: BTreeMap<usize, Vec<Subdivision>> = BTreeMap::new();
    for b in bases {
        plans.entry(b.graph.edge_count()).or_insert_with(|| {
            config.added.iter().flat_map(|&a| subdivision_plans(b.graph.edge_count(), a, config.max_per_edge)).collect()
        });
    }
    let mut order: Vec<(usize, usize)> = bases
        .iter()
        .enumerate()
        .flat_map(|(i, b)| (0..plans[&b.graph.edge_count()].len()).map(move |r| (i, r)))
        .collect();
    if let SearchOrder::Random(seed) = config.order {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let skip = match config.resume {
        None => 0,
        Some(c) if c.completed == 0 => 0,
        Some(c) => match order.get(c.completed - 1) {
            Some(&(b, r)) if bases[b].line == c.base_line && r == c.rank => c.completed,
            _ => return Err(Error::Precondition("checkpoint does not match this corpus and order".into())),
        },
    };
    let mut summary = SearchSummary { tasks: order.len(), ..Default::default() };
    let filters: Vec<OnceLock<bool>> = bases.iter().map(|_| OnceLock::new()).collect();
    let is_filtered = |i: usize| {
        *filters[i].get_or_init(|| {
            !(prefilter(&bases[i].graph, &config.groups.0) && prefilter(&bases[i].graph, &config.groups.1))
        })
    };
    let evaluate = |t: &Task| -> TaskReport {
        let base = &bases[t.base];
        let plan = &plans[&base.graph.edge_count()][t.rank];
        let outcome = run_task(base, plan, config, is_filtered(t.base)).unwrap_or_else(|e| Outcome::Failed(e.to_string()));
        TaskReport { position: t.position, base_line: base.line, rank: t.rank, outcome }
    };

    let workers = config.workers.max(1);
    let (task_tx, task_rx) = bounded::<Task>(workers * 4);
    let (report_tx, report_rx) = unbounded::<TaskReport>();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            let task_rx = task_rx.clone();
            let report_tx = report_tx.clone();
            let evaluate = &evaluate;
            scope.spawn(move || {
                for t in task_rx {
                    if report_tx.send(evaluate(&t)).is_err() {
                        break;
                    }
                }
            });
        }
        drop(task_rx);
        drop(report_tx);

        let mut pending = order.iter().enumerate().skip(skip).map(|(position, &(base, rank))| Task { position, base, rank });
        let mut in_flight = 0;
        let mut next = skip;
        let mut buffer: BTreeMap<usize, TaskReport> = BTreeMap::new();
        let mut stopped = false;
        loop {
            while !stopped && in_flight < workers * 4 {
                match pending.next() {
                    Some(t) => {
                        task_tx.send(t).expect("workers alive");
                        in_flight += 1;
                    }
                    None => break,
                }
            }
            if in_flight == 0 {
                break;
            }
            let report = report_rx.recv().expect("workers alive");
            in_flight -= 1;
            buffer.insert(report.position, report);
            while let Some(report) = buffer.remove(&next) {
                next += 1;
                if stopped {
                    continue;
                }
                summary.processed += 1;
                match &report.outcome {
                    Outcome::Filtered => summary.filtered += 1,
                    Outcome::BothNo => summary.both_no += 1,
                    Outcome::Unscreened => summary.unscreened += 1,
                    Outcome::Agree(_) => summary.agree += 1,
                    Outcome::Witness(_) => summary.witnesses += 1,
                    Outcome::Failed(_) => summary.failed += 1,
                }
                if !sink(&report) {
                    stopped = true;
                }
            }
        }
        drop(task_tx);
    });
    Ok(summary)
}
