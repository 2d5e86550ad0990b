//! Decision procedures for group connectivity.
//!
//! [`decide`] preprocesses the graph, splits it into components and runs one
//! of three solvers on each:
//!
//! * [`solve_ultra_naive`] tries every forbidden mapping on every edge;
//! * [`solve_naive`] tries only mappings that vanish off a spanning tree;
//! * [`solve_fast`] marks the class of every mapping avoided by the zero flow
//!   and reports a class that was never marked.
//!
//! Every NO verdict carries a certificate on the input graph which has been
//! checked against the exhaustive flow search before it is returned.

mod certificate;
mod fast;
mod naive;
mod preprocess;
mod screen;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use certificate::{certificate_entries, mapping_from_entries, verify_certificate, CertificateEntry};
pub use fast::{solve_fast, FastOptions};
pub use naive::{solve_naive, solve_ultra_naive, ULTRA_BUDGET};
pub use preprocess::{preprocess, Component, PreprocessOptions, ReducedInstance, Reduction};
pub use screen::{screen, ScreenOptions};

use crate::error::{Error, Result};
use crate::flows::EdgeVector;
use crate::graph::Digraph;
use crate::group::Group;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Fast,
    Naive,
    Ultra,
    Auto,
}

impl Algorithm {
    /// Concrete solver for an instance with `m` edges.
    pub fn resolve(self, m: usize) -> Algorithm {
        match self {
            Algorithm::Auto if m <= 8 => Algorithm::Ultra,
            Algorithm::Auto if m <= 12 => Algorithm::Naive,
            Algorithm::Auto => Algorithm::Fast,
            a => a,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Fast => "fast",
            Algorithm::Naive => "naive",
            Algorithm::Ultra => "ultra",
            Algorithm::Auto => "auto",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fast" => Ok(Algorithm::Fast),
            "naive" => Ok(Algorithm::Naive),
            "ultra" | "ultra-naive" => Ok(Algorithm::Ultra),
            "auto" => Ok(Algorithm::Auto),
            other => Err(Error::Precondition(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecideOptions {
    pub algorithm: Algorithm,
    /// Reduce the graph before solving. Without it the solver sees the raw
    /// input, loops and bridges included.
    pub preprocess: bool,
    /// Thread rules: long-thread reductions in preprocessing and the merging
    /// of once-subdivided edges in the fast solver.
    pub thread_opts: bool,
    /// Worker threads for the fast solver's enumeration.
    pub workers: usize,
    /// Largest marking table, as a power of two in bits.
    pub max_table_bits: u32,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions { algorithm: Algorithm::Auto, preprocess: true, thread_opts: true, workers: 1, max_table_bits: 32 }
    }
}

impl DecideOptions {
    pub fn with_algorithm(algorithm: Algorithm) -> Self {
        DecideOptions { algorithm, ..Default::default() }
    }

    fn fast(&self) -> FastOptions {
        FastOptions { merge_threads: self.thread_opts, workers: self.workers, max_table_bits: self.max_table_bits }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    /// Size of the class-key space, summed over solved components.
    pub classes_total: u64,
    /// Keys that fall in the throw-away class.
    pub classes_null: u64,
    /// Canonical non-throw-away keys.
    pub classes_canonical: u64,
    /// Forbidden mappings generated by the solver.
    pub mappings_enumerated: u64,
    /// Calls into the exhaustive satisfying-flow search.
    pub flow_searches: u64,
    pub components: usize,
    pub elapsed_ms: f64,
}

impl Stats {
    fn absorb(&mut self, other: &Stats) {
        self.classes_total += other.classes_total;
        self.classes_null += other.classes_null;
        self.classes_canonical += other.classes_canonical;
        self.mappings_enumerated += other.mappings_enumerated;
        self.flow_searches += other.flow_searches;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub connected: bool,
    /// A forbidden mapping with no satisfying flow; present iff not connected.
    pub certificate: Option<EdgeVector>,
    pub algorithm: String,
    pub preprocessing: Vec<String>,
    pub stats: Stats,
}

impl Verdict {
    pub(crate) fn yes(algorithm: &str, stats: Stats) -> Self {
        Verdict { connected: true, certificate: None, algorithm: algorithm.to_string(), preprocessing: Vec::new(), stats }
    }

    pub(crate) fn no(algorithm: &str, certificate: EdgeVector, stats: Stats) -> Self {
        Verdict {
            connected: false,
            certificate: Some(certificate),
            algorithm: algorithm.to_string(),
            preprocessing: Vec::new(),
            stats,
        }
    }
}

fn run_solver(algorithm: Algorithm, g: &Digraph, group: &Group, options: &DecideOptions) -> Result<Verdict> {
    match algorithm.resolve(g.edge_count()) {
        Algorithm::Ultra => solve_ultra_naive(g, group),
        Algorithm::Naive => solve_naive(g, group),
        _ => solve_fast(g, group, &options.fast()),
    }
}

/// Decides whether `g` is `group`-connected.
pub fn decide(g: &Digraph, group: &Group, options: &DecideOptions) -> Result<Verdict> {
    let start = Instant::now();
    let mut verdict = if options.preprocess {
        decide_reduced(g, group, options)?
    } else {
        let mut v = run_solver(options.algorithm, g, group, options)?;
        v.stats.components = 1;
        v
    };
    if let Some(h) = &verdict.certificate {
        if !verify_certificate(g, group, h)? {
            return Err(Error::Internal(format!("certificate from {} does not verify", verdict.algorithm)));
        }
    }
    verdict.stats.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(verdict)
}

fn decide_reduced(g: &Digraph, group: &Group, options: &DecideOptions) -> Result<Verdict> {
    let reduced = preprocess(g, group, &PreprocessOptions { thread_rules: options.thread_opts });
    let steps = reduced.steps.clone();
    let components = match &reduced.reduction {
        Reduction::No(h) => {
            let mut v = Verdict::no("preprocessing", h.clone(), Stats::default());
            v.preprocessing = steps;
            return Ok(v);
        }
        Reduction::Components(c) => c,
    };
    let mut stats = Stats { components: components.len(), ..Stats::default() };
    let mut used: Vec<&str> = Vec::new();
    for (i, comp) in components.iter().enumerate() {
        let algorithm = options.algorithm.resolve(comp.graph.edge_count());
        if !used.contains(&algorithm.name()) {
            used.push(algorithm.name());
        }
        let v = run_solver(algorithm, &comp.graph, group, options)?;
        stats.absorb(&v.stats);
        if let Some(h) = v.certificate {
            let lifted = reduced.lift(i, &h);
            let mut out = Verdict::no(algorithm.name(), lifted, stats);
            out.preprocessing = steps;
            return Ok(out);
        }
    }
    let name = if used.is_empty() { "preprocessing".to_string() } else { used.join("+") };
    let mut v = Verdict::yes(&name, stats);
    v.preprocessing = steps;
    Ok(v)
}
