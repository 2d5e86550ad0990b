//! Command-line front end.
//!
//! Exit codes: 0 for a positive answer, 1 for a negative one, 2 for usage
//! or input errors. Stdout carries JSON only; summaries go to stderr.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use groupcon::graph::{parse_edgelist, parse_graph6};
use groupcon::search::{discrepancy_search, parse_bases, Checkpoint, Outcome, SearchConfig, SearchOrder};
use groupcon::solver::{certificate_entries, mapping_from_entries, CertificateEntry, ScreenOptions, Stats};
use groupcon::{decide, Algorithm, DecideOptions, Digraph, FlowSpace, Group, Verdict};
use serde::{Deserialize, Serialize};
use serde_json::json;

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Largest edge count for which `flows` lists every flow.
pub const FLOW_LIST_MAX_EDGES: usize = 12;

#[derive(Debug, Parser)]
#[command(name = "groupcon", version, about = "Group connectivity of graphs over small abelian groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a graph is connected over a group.
    Test(TestArgs),
    /// Look for a nowhere-zero flow.
    Nzflow(GraphArgs),
    /// Check that a forbidden mapping admits no satisfying flow.
    Certify(CertifyArgs),
    /// Search subdivisions of base graphs for groups that disagree.
    Search(SearchArgs),
    /// Print the flow space.
    Flows(GraphArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Auto,
    Graph6,
    Edgelist,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Graph file, or `-` for stdin.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Auto)]
    pub format: Format,
    /// Group such as `z4`, `z2^2`, `z2xz3`.
    #[arg(long, default_value = "z4")]
    pub group: String,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub input: GraphArgs,
    /// fast, naive, ultra or auto.
    #[arg(long, default_value = "auto")]
    pub algo: String,
    #[arg(long)]
    pub no_preprocess: bool,
    /// Disable the thread reductions and the thread merging in the fast solver.
    #[arg(long)]
    pub no_thread_opts: bool,
    /// Worker threads for the fast solver.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Largest marking table, as a power of two in bits.
    #[arg(long, default_value_t = 32)]
    pub max_table_bits: u32,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub input: GraphArgs,
    /// Verdict JSON or a bare list of `{tail, head, forbidden}` entries.
    #[arg(long)]
    pub certificate: PathBuf,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// graph6 file with one base graph per line.
    #[arg(long)]
    pub bases: PathBuf,
    /// Added vertices: `3`, `1,2` or `1..7` (inclusive).
    #[arg(long)]
    pub added: String,
    #[arg(long, default_value = "z4,z2^2")]
    pub groups: String,
    #[arg(long, default_value_t = OrderArg::Sequential, value_enum)]
    pub order: OrderArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Subdivide each edge at most this many times.
    #[arg(long)]
    pub max_per_edge: Option<usize>,
    /// Random starts of the NO screen per component.
    #[arg(long, default_value_t = ScreenOptions::default().starts)]
    pub screen_starts: usize,
    /// Local moves per start of the NO screen.
    #[arg(long, default_value_t = ScreenOptions::default().steps)]
    pub screen_steps: usize,
    /// Run full decisions even when neither group screens NO.
    #[arg(long)]
    pub exhaustive: bool,
    /// File receiving the position of the last completed task.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Continue from the checkpoint file.
    #[arg(long, requires = "checkpoint")]
    pub resume: bool,
    /// Append witnesses to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Stop after this many witnesses.
    #[arg(long)]
    pub max_witnesses: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Sequential,
    Random,
}

#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type CmdResult = Result<i32, Failure>;

/// JSON shape of a verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictJson {
    pub graph: String,
    pub group: String,
    pub connected: bool,
    pub certificate: Option<Vec<CertificateEntry>>,
    pub stats: Stats,
    pub algorithm: String,
    pub preprocessing: Vec<String>,
}

impl VerdictJson {
    /// `graph` is echoed as given.
    pub fn new(graph: String, g: &Digraph, group: &Group, v: Verdict) -> groupcon::Result<Self> {
        let certificate = v.certificate.as_ref().map(|h| certificate_entries(g, group, h)).transpose()?;
        Ok(VerdictJson {
            graph,
            group: group.name(),
            connected: v.connected,
            certificate,
            stats: v.stats,
            algorithm: v.algorithm,
            preprocessing: v.preprocessing,
        })
    }
}

/// Parses arguments and runs. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_YES,
                _ => EXIT_ERROR,
            };
        }
    };
    let result = match &cli.command {
        Command::Test(a) => cmd_test(a, out, err),
        Command::Nzflow(a) => cmd_nzflow(a, out),
        Command::Certify(a) => cmd_certify(a, out, err),
        Command::Search(a) => cmd_search(a, out, err),
        Command::Flows(a) => cmd_flows(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}

fn read_source(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

/// Reads a graph. With `Format::Auto`, `.g6` files are graph6 and anything
/// whose first line holds two numbers is an edge list.
pub fn load_graph(path: &Path, format: Format) -> Result<(String, Digraph), String> {
    let text = read_source(path).map_err(|f| f.0)?;
    let format = match format {
        Format::Auto if path.extension().is_some_and(|e| e == "g6") => Format::Graph6,
        Format::Auto => {
            let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
            if first.split_whitespace().count() >= 2 {
                Format::Edgelist
            } else {
                Format::Graph6
            }
        }
        f => f,
    };
    let graph = match format {
        Format::Graph6 => {
            let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
            let line = lines.next().ok_or("empty graph6 file")?;
            if lines.next().is_some() {
                return Err("graph6 file holds more than one graph".into());
            }
            parse_graph6(line)
        }
        _ => parse_edgelist(&text),
    }
    .map_err(|e| e.to_string())?;
    Ok((text.trim().to_string(), graph))
}

fn load(args: &GraphArgs) -> Result<(String, Digraph, Group), Failure> {
    let (text, g) = load_graph(&args.graph, args.format).map_err(Failure)?;
    let group: Group = args.group.parse()?;
    Ok((text, g, group))
}

fn print_json(out: &mut dyn Write, value: &impl Serialize) -> Result<(), Failure> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_test(a: &TestArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let (text, g, group) = load(&a.input)?;
    let options = DecideOptions {
        algorithm: a.algo.parse::<Algorithm>()?,
        preprocess: !a.no_preprocess,
        thread_opts: !a.no_thread_opts,
        workers: a.workers.max(1),
        max_table_bits: a.max_table_bits,
    };
    let v = decide(&g, &group, &options)?;
    writeln!(
        err,
        "n={} m={} over {}: {} ({}, {:.1} ms)",
        g.vertex_count(),
        g.edge_count(),
        group,
        if v.connected { "connected" } else { "not connected" },
        v.algorithm,
        v.stats.elapsed_ms
    )?;
    let connected = v.connected;
    print_json(out, &VerdictJson::new(text, &g, &group, v)?)?;
    Ok(if connected { EXIT_YES } else { EXIT_NO })
}

fn format_flow(group: &Group, flow: &[u8]) -> Vec<String> {
    flow.iter().map(|&a| group.format_element(a)).collect()
}

fn cmd_nzflow(a: &GraphArgs, out: &mut dyn Write) -> CmdResult {
    let (text, g, group) = load(a)?;
    let flow = FlowSpace::new(&g, &group).nowhere_zero_flow();
    print_json(
        out,
        &json!({
            "graph": text,
            "group": group.name(),
            "exists": flow.is_some(),
            "flow": flow.as_ref().map(|f| format_flow(&group, f)),
        }),
    )?;
    Ok(if flow.is_some() { EXIT_YES } else { EXIT_NO })
}

fn cmd_flows(a: &GraphArgs, out: &mut dyn Write) -> CmdResult {
    let (text, g, group) = load(a)?;
    let space = FlowSpace::new(&g, &group);
    let flows = (g.edge_count() <= FLOW_LIST_MAX_EDGES).then(|| {
        let mut all = Vec::new();
        space.for_each_flow(|f| {
            all.push(format_flow(&group, f));
            false
        });
        all
    });
    print_json(
        out,
        &json!({
            "graph": text,
            "group": group.name(),
            "rank": space.rank(),
            "count": space.size(),
            "flows": flows,
        }),
    )?;
    Ok(EXIT_YES)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CertificateFile {
    Entries(Vec<CertificateEntry>),
    Verdict { certificate: Option<Vec<CertificateEntry>> },
}

fn cmd_certify(a: &CertifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let (_, g, group) = load(&a.input)?;
    let text = read_source(&a.certificate)?;
    let entries = match serde_json::from_str::<CertificateFile>(&text) {
        Ok(CertificateFile::Entries(e)) | Ok(CertificateFile::Verdict { certificate: Some(e) }) => e,
        Ok(CertificateFile::Verdict { certificate: None }) => return Err(Failure("verdict carries no certificate".into())),
        Err(e) => return Err(Failure(format!("malformed certificate: {e}"))),
    };
    let h = mapping_from_entries(&g, &group, &entries)?;
    let flow = FlowSpace::new(&g, &group).find_satisfying(&h)?;
    print_json(
        out,
        &json!({
            "valid": flow.is_none(),
            "flow": flow.as_ref().map(|f| format_flow(&group, f)),
        }),
    )?;
    writeln!(err, "{}", if flow.is_none() { "certificate valid" } else { "certificate refuted by a satisfying flow" })?;
    Ok(if flow.is_none() { EXIT_YES } else { EXIT_NO })
}

/// Parses `3`, `1,2,5` or `1..7`.
pub fn parse_added(s: &str) -> Result<Vec<usize>, String> {
    let bad = || format!("bad --added value {s:?}");
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        match part.split_once("..") {
            Some((lo, hi)) => {
                let lo: usize = lo.trim().parse().map_err(|_| bad())?;
                let hi: usize = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
                if lo > hi {
                    return Err(bad());
                }
                out.extend(lo..=hi);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}

fn write_checkpoint(path: &Path, c: &Checkpoint) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, c.to_string())?;
    fs::rename(tmp, path)
}

const CHECKPOINT_EVERY: Duration = Duration::from_secs(2);

fn cmd_search(a: &SearchArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let bases = parse_bases(&read_source(&a.bases)?)?;
    let groups: Vec<Group> = a.groups.split(',').map(str::parse).collect::<Result<_, _>>()?;
    let [g1, g2]: [Group; 2] = groups.try_into().map_err(|_| Failure("--groups needs exactly two groups".into()))?;
    let mut config = SearchConfig::new((g1, g2), parse_added(&a.added)?);
    config.max_per_edge = a.max_per_edge;
    config.order = match a.order {
        OrderArg::Sequential => SearchOrder::Sequential,
        OrderArg::Random => SearchOrder::Random(a.seed),
    };
    config.workers = a.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    config.screen = ScreenOptions { starts: a.screen_starts, steps: a.screen_steps, seed: a.seed };
    config.exhaustive = a.exhaustive;
    if a.resume {
        let path = a.checkpoint.as_ref().expect("clap enforces --checkpoint");
        if path.exists() {
            let c: Checkpoint = fs::read_to_string(path)?.parse()?;
            writeln!(err, "resuming after task {} (base line {}, rank {})", c.completed, c.base_line, c.rank)?;
            config.resume = Some(c);
        }
    }

    let mut file = match &a.output {
        Some(p) => Some(fs::OpenOptions::new().create(true).append(true).open(p)?),
        None => None,
    };
    let started = Instant::now();
    let mut last_saved = Instant::now();
    let mut witnesses = 0;
    let mut last: Option<Checkpoint> = None;
    let mut io_error: Option<io::Error> = None;
    let summary = discrepancy_search(&bases, &config, |report| {
        let mut step = || -> io::Result<bool> {
            match &report.outcome {
                Outcome::Witness(w) => {
                    let line = serde_json::to_string(w).map_err(io::Error::other)?;
                    match file.as_mut() {
                        Some(f) => writeln!(f, "{line}")?,
                        None => writeln!(out, "{line}")?,
                    }
                    witnesses += 1;
                    writeln!(
                        err,
                        "witness: base line {} rank {}: {} yes, {} no ({} vertices, {} edges)",
                        w.base_line, report.rank, w.connected_group, w.disconnected_group, w.n, w.m
                    )?;
                }
                Outcome::Failed(msg) => {
                    writeln!(err, "task {} (base line {}, rank {}) failed: {msg}", report.position, report.base_line, report.rank)?
                }
                _ => {}
            }
            last = Some(report.checkpoint());
            if let Some(path) = &a.checkpoint {
                let witness = matches!(report.outcome, Outcome::Witness(_));
                if witness || last_saved.elapsed() >= CHECKPOINT_EVERY {
                    write_checkpoint(path, &report.checkpoint())?;
                    last_saved = Instant::now();
                }
            }
            Ok(a.max_witnesses.is_none_or(|max| witnesses < max))
        };
        match step() {
            Ok(go_on) => go_on,
            Err(e) => {
                io_error = Some(e);
                false
            }
        }
    });
    if let Some(e) = io_error {
        return Err(e.into());
    }
    let summary = summary?;
    if let (Some(path), Some(c)) = (&a.checkpoint, &last) {
        write_checkpoint(path, c)?;
    }
    writeln!(
        err,
        "{} of {} tasks in {:.1} s: {} witnesses, {} filtered, {} both no, {} unscreened, {} agreeing, {} failed",
        summary.processed,
        summary.tasks,
        started.elapsed().as_secs_f64(),
        summary.witnesses,
        summary.filtered,
        summary.both_no,
        summary.unscreened,
        summary.agree,
        summary.failed
    )?;
    Ok(EXIT_YES)
}
