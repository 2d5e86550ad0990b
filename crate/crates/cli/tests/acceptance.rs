//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use groupcon::flows::has_nowhere_zero_flow;
use groupcon::search::{discrepancy_search, parse_bases, Outcome, SearchConfig, Witness};
use groupcon::solver::{mapping_from_entries, solve_naive, solve_ultra_naive, verify_certificate};
use groupcon::{decide, Algorithm, DecideOptions, Digraph, Group, Verdict};
use groupcon_cli::{run, VerdictJson, EXIT_YES};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ORACLE_MAX_EDGES: usize = 8;
/// Connected multigraphs with loops, by edge count 1..=8, up to isomorphism.
const CORPUS_COUNTS: [usize; 8] = [2, 4, 11, 30, 95, 328, 1211, 4779];
const RANDOM_ORACLE_GRAPHS: usize = 500;
const RANDOM_ORACLE_MAX_EDGES: usize = 12;
const ORACLE_TIME_LIMIT: Duration = Duration::from_secs(600);

const CYCLE_LENGTHS: std::ops::RangeInclusive<usize> = 1..=6;
const CYCLE_TIME_LIMIT: Duration = Duration::from_secs(30);

const DENSE_TIME_LIMIT: Duration = Duration::from_secs(60);

const NZ_GRAPHS: usize = 100;
const NZ_MAX_EDGES: usize = 14;
const NZ_TIME_LIMIT: Duration = Duration::from_secs(300);

const CUBE_ADDED: std::ops::RangeInclusive<usize> = 1..=7;

const WITNESS_FIXTURE: &str = "tests/data/z2sq_yes_z4_no.json";
const WITNESS_TIME_LIMIT: Duration = Duration::from_secs(900);

const SPEEDUP_TARGET: f64 = 10.0;
const SPEEDUP_ROUNDS: usize = 7;

/// Every NO verdict produced by the suite, replayed through `certify`.
#[derive(Default)]
struct Ledger {
    no_verdicts: Vec<(Digraph, Group, Verdict)>,
}

impl Ledger {
    fn record(&mut self, g: &Digraph, group: &Group, v: &Verdict) {
        if !v.connected {
            self.no_verdicts.push((g.clone(), group.clone(), v.clone()));
        }
    }
}

struct Report {
    pass: bool,
    detail: String,
}

fn report(pass: bool, detail: impl Into<String>) -> Report {
    Report { pass, detail: detail.into() }
}

fn small_groups() -> Vec<Group> {
    ["z2", "z3", "z4", "z2^2"].iter().map(|s| s.parse().unwrap()).collect()
}

fn no_preprocess(algorithm: Algorithm) -> DecideOptions {
    DecideOptions { preprocess: false, ..DecideOptions::with_algorithm(algorithm) }
}

// Canonical forms for small multigraphs: refine vertex colours, then try
// every relabelling that respects the colour classes.

type Form = (usize, Vec<(usize, usize)>);

fn refine(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut colour = vec![0usize; n];
    loop {
        let mut sig: Vec<(usize, Vec<(usize, bool)>)> = (0..n).map(|v| (colour[v], Vec::new())).collect();
        for &(a, b) in edges {
            sig[a].1.push((colour[b], a == b));
            if a != b {
                sig[b].1.push((colour[a], false));
            }
        }
        for s in &mut sig {
            s.1.sort_unstable();
        }
        let mut distinct: Vec<_> = sig.clone();
        distinct.sort();
        distinct.dedup();
        let next: Vec<usize> = sig.iter().map(|s| distinct.binary_search(s).unwrap()).collect();
        let before = colour.iter().collect::<HashSet<_>>().len();
        colour = next;
        if distinct.len() == before {
            return colour;
        }
    }
}

fn canonical(n: usize, edges: &[(usize, usize)]) -> Form {
    let colour = refine(n, edges);
    let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, &c) in colour.iter().enumerate().take(n) {
        cells.entry(c).or_default().push(v);
    }
    let cells: Vec<Vec<usize>> = cells.into_values().collect();
    let mut best: Option<Vec<(usize, usize)>> = None;
    let mut label = vec![0; n];
    fn place(
        cells: &[Vec<usize>],
        ci: usize,
        next: usize,
        used: &mut Vec<bool>,
        label: &mut Vec<usize>,
        edges: &[(usize, usize)],
        best: &mut Option<Vec<(usize, usize)>>,
    ) {
        if ci == cells.len() {
            let mut e: Vec<(usize, usize)> = edges
                .iter()
                .map(|&(a, b)| (label[a].min(label[b]), label[a].max(label[b])))
                .collect();
            e.sort_unstable();
            if best.as_ref().is_none_or(|b| e < *b) {
                *best = Some(e);
            }
            return;
        }
        let cell = &cells[ci];
        for &v in cell {
            if used[v] {
                continue;
            }
            used[v] = true;
            label[v] = next;
            let done = cell.iter().all(|&w| used[w]);
            place(cells, if done { ci + 1 } else { ci }, next + 1, used, label, edges, best);
            used[v] = false;
        }
    }
    place(&cells, 0, 0, &mut vec![false; n], &mut label, edges, &mut best);
    (n, best.unwrap_or_default())
}

/// Connected multigraphs (loops allowed) with 1..=max_m edges, one per
/// isomorphism class, grouped by edge count.
fn multigraph_corpus(max_m: usize) -> Vec<Vec<Digraph>> {
    let mut layers = Vec::new();
    let mut current: Vec<Form> = vec![(1, Vec::new())];
    for _ in 0..max_m {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for (n, edges) in &current {
            let n = *n;
            let mut grow = |n2: usize, e: (usize, usize)| {
                let mut edges = edges.clone();
                edges.push(e);
                let form = canonical(n2, &edges);
                if seen.insert(form.clone()) {
                    next.push(form);
                }
            };
            for a in 0..n {
                for b in a..n {
                    grow(n, (a, b));
                }
                grow(n + 1, (a, n));
            }
        }
        next.sort();
        layers.push(next.iter().map(|(n, e)| Digraph::new(*n, e.clone()).unwrap()).collect());
        current = next;
    }
    layers
}

fn random_connected(rng: &mut ChaCha8Rng, max_n: usize, max_m: usize) -> Digraph {
    let n = rng.gen_range(2..=max_n);
    let m = rng.gen_range(n - 1..=max_m.max(n - 1));
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    while edges.len() < m {
        edges.push((rng.gen_range(0..n), rng.gen_range(0..n)));
    }
    // Random orientation and order.
    for e in edges.iter_mut() {
        if rng.gen_bool(0.5) {
            *e = (e.1, e.0);
        }
    }
    for i in (1..edges.len()).rev() {
        edges.swap(i, rng.gen_range(0..=i));
    }
    Digraph::new(n, edges).unwrap()
}

fn criterion_1(ledger: &mut Ledger) -> Report {
    let start = Instant::now();
    let layers = multigraph_corpus(ORACLE_MAX_EDGES);
    let counts: Vec<usize> = layers.iter().map(Vec::len).collect();
    if counts != CORPUS_COUNTS {
        return report(false, format!("corpus counts {counts:?}, expected {CORPUS_COUNTS:?}"));
    }
    let mut checked = 0;
    let mut mismatches = Vec::new();
    let fast = DecideOptions::with_algorithm(Algorithm::Fast);
    let fast_plain = DecideOptions { thread_opts: false, ..fast };
    for g in layers.iter().flatten() {
        for group in small_groups() {
            let verdicts = [
                solve_ultra_naive(g, &group).unwrap(),
                solve_naive(g, &group).unwrap(),
                decide(g, &group, &no_preprocess(Algorithm::Naive)).unwrap(),
                decide(g, &group, &fast).unwrap(),
                decide(g, &group, &fast_plain).unwrap(),
            ];
            for v in &verdicts {
                ledger.record(g, &group, v);
            }
            if verdicts.iter().any(|v| v.connected != verdicts[0].connected) {
                mismatches.push(format!("{:?} over {group}", g.edges()));
            }
            checked += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut random = 0;
    while random < RANDOM_ORACLE_GRAPHS {
        let g = random_connected(&mut rng, 8, RANDOM_ORACLE_MAX_EDGES);
        let group = &small_groups()[random % 4];
        let naive = solve_naive(&g, group).unwrap();
        let fast = decide(&g, group, &fast).unwrap();
        ledger.record(&g, group, &naive);
        ledger.record(&g, group, &fast);
        if naive.connected != fast.connected {
            mismatches.push(format!("random {:?} over {group}", g.edges()));
        }
        random += 1;
    }
    let elapsed = start.elapsed();
    report(
        mismatches.is_empty() && elapsed < ORACLE_TIME_LIMIT,
        format!(
            "{checked} corpus instances ({} graphs), {random} random graphs, {} disagreements, {:.1} s{}",
            counts.iter().sum::<usize>(),
            mismatches.len(),
            elapsed.as_secs_f64(),
            mismatches.first().map(|m| format!("; first: {m}")).unwrap_or_default()
        ),
    )
}

fn criterion_2(ledger: &mut Ledger) -> Report {
    let start = Instant::now();
    let groups: Vec<Group> =
        ["z2", "z3", "z4", "z2^2", "z5", "z6", "z2xz3"].iter().map(|s| s.parse().unwrap()).collect();
    let mut wrong = Vec::new();
    let mut cases = 0;
    for group in &groups {
        for len in CYCLE_LENGTHS {
            let g = Digraph::cycle(len);
            let expected = len < group.order();
            let mut verdicts = vec![solve_ultra_naive(&g, group).unwrap(), solve_naive(&g, group).unwrap()];
            for algorithm in [Algorithm::Ultra, Algorithm::Naive, Algorithm::Fast] {
                verdicts.push(decide(&g, group, &DecideOptions::with_algorithm(algorithm)).unwrap());
            }
            for v in &verdicts {
                ledger.record(&g, group, v);
                cases += 1;
                if v.connected != expected {
                    wrong.push(format!("C{len} over {group} ({})", v.algorithm));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        wrong.is_empty() && elapsed < CYCLE_TIME_LIMIT,
        format!("{cases} verdicts, {} wrong, {:.2} s {}", wrong.len(), elapsed.as_secs_f64(), wrong.join(", ")),
    )
}

fn criterion_3(ledger: &mut Ledger) -> Report {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (name, g) in [("K5", Digraph::complete(5)), ("K6", Digraph::complete(6)), ("octahedron", Digraph::octahedron())] {
        for group in [Group::z4(), Group::z2_squared()] {
            let v = decide(&g, &group, &DecideOptions::with_algorithm(Algorithm::Fast)).unwrap();
            ledger.record(&g, &group, &v);
            if !v.connected {
                failures.push(format!("{name} over {group}"));
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        failures.is_empty() && elapsed < DENSE_TIME_LIMIT,
        format!("6 instances, {} NO, {:.2} s {}", failures.len(), elapsed.as_secs_f64(), failures.join(", ")),
    )
}

fn criterion_4() -> Report {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut both, mut neither, mut split) = (0, 0, 0);
    for _ in 0..NZ_GRAPHS {
        let g = random_connected(&mut rng, 10, NZ_MAX_EDGES);
        match (
            has_nowhere_zero_flow(&g, &Group::z4()).is_some(),
            has_nowhere_zero_flow(&g, &Group::z2_squared()).is_some(),
        ) {
            (true, true) => both += 1,
            (false, false) => neither += 1,
            _ => split += 1,
        }
    }
    let elapsed = start.elapsed();
    report(
        split == 0 && elapsed < NZ_TIME_LIMIT,
        format!("{both} with both flows, {neither} with neither, {split} split, {:.2} s", elapsed.as_secs_f64()),
    )
}

/// Re-checks a witness from scratch.
fn recheck(w: &Witness, ledger: &mut Ledger) -> Result<(), String> {
    let g = groupcon::graph::parse_edgelist(&w.graph).map_err(|e| e.to_string())?;
    let yes: Group = w.connected_group.parse().map_err(|e: groupcon::Error| e.to_string())?;
    let no: Group = w.disconnected_group.parse().map_err(|e: groupcon::Error| e.to_string())?;
    let yes_verdict = decide(&g, &yes, &DecideOptions::with_algorithm(Algorithm::Fast)).map_err(|e| e.to_string())?;
    if !yes_verdict.connected {
        return Err(format!("{yes} side decides NO"));
    }
    let no_verdict = decide(&g, &no, &DecideOptions::with_algorithm(Algorithm::Fast)).map_err(|e| e.to_string())?;
    ledger.record(&g, &no, &no_verdict);
    if no_verdict.connected {
        return Err(format!("{no} side decides YES"));
    }
    let h = mapping_from_entries(&g, &no, &w.certificate).map_err(|e| e.to_string())?;
    if !verify_certificate(&g, &no, &h).map_err(|e| e.to_string())? {
        return Err("stored certificate has a satisfying flow".into());
    }
    ledger.no_verdicts.push((g.clone(), no.clone(), Verdict { certificate: Some(h), ..no_verdict }));
    Ok(())
}

fn criterion_5(ledger: &mut Ledger) -> Report {
    let start = Instant::now();
    let bases = parse_bases(&fs::read_to_string("../../data/cube.g6").unwrap()).unwrap();
    let config = SearchConfig::new((Group::z4(), Group::z2_squared()), CUBE_ADDED.collect());
    let mut found: Option<Witness> = None;
    let summary = discrepancy_search(&bases, &config, |r| match &r.outcome {
        Outcome::Witness(w) if w.connected_group == "z4" => {
            found = Some((**w).clone());
            false
        }
        _ => true,
    })
    .unwrap();
    let Some(w) = found else {
        return report(false, format!("no witness in {} of {} tasks", summary.processed, summary.tasks));
    };
    let checked = recheck(&w, ledger);
    report(
        checked.is_ok(),
        format!(
            "witness after {} tasks: n={} m={}, subdivisions {:?}, {:.1} s{}",
            summary.processed,
            w.n,
            w.m,
            w.subdivisions,
            start.elapsed().as_secs_f64(),
            checked.err().map(|e| format!("; {e}")).unwrap_or_default()
        ),
    )
}

fn criterion_6(ledger: &mut Ledger) -> Report {
    let start = Instant::now();
    let Ok(text) = fs::read_to_string(WITNESS_FIXTURE) else {
        return report(false, format!("fixture {WITNESS_FIXTURE} missing"));
    };
    let w: Witness = match serde_json::from_str(&text) {
        Ok(w) => w,
        Err(e) => return report(false, format!("bad fixture: {e}")),
    };
    let shape_ok = w.connected_group == "z2^2"
        && w.disconnected_group == "z4"
        && w.n == 15
        && w.subdivisions.len() == 3
        && w.subdivisions.iter().all(|&(_, c)| c == 1);
    let checked = recheck(&w, ledger);
    let elapsed = start.elapsed();
    report(
        shape_ok && checked.is_ok() && elapsed < WITNESS_TIME_LIMIT,
        format!(
            "base {} subdivided at {:?}: n={} m={}, {:.1} s{}",
            w.base_graph6,
            w.subdivisions.iter().map(|&(e, _)| e).collect::<Vec<_>>(),
            w.n,
            w.m,
            elapsed.as_secs_f64(),
            checked.err().map(|e| format!("; {e}")).unwrap_or_default()
        ),
    )
}

fn thread_cpu_time() -> Duration {
    let mut ts = libc::timespec { tv_sec: 0, tv_nsec: 0 };
    // SAFETY: `ts` is a valid out-pointer for the duration of the call.
    let rc = unsafe { libc::clock_gettime(libc::CLOCK_THREAD_CPUTIME_ID, &mut ts) };
    assert_eq!(rc, 0);
    Duration::new(ts.tv_sec as u64, ts.tv_nsec as u32)
}

fn criterion_7() -> Report {
    let cube = Digraph::cube();
    let graphs: Vec<Digraph> = groupcon::search::enumerate_subdivisions(&cube, 2, None).into_iter().map(|(_, g)| g).collect();
    let mut detail = Vec::new();
    let mut pass = graphs.len() == 78;
    for group in [Group::z4(), Group::z2_squared()] {
        let fast = DecideOptions::with_algorithm(Algorithm::Fast);
        let plain = DecideOptions { thread_opts: false, ..fast };
        let time = |options: &DecideOptions| {
            let start = thread_cpu_time();
            let verdicts: Vec<bool> = graphs.iter().map(|g| decide(g, &group, options).unwrap().connected).collect();
            (thread_cpu_time() - start, verdicts)
        };
        // CPU time of this thread, so other load on the machine does not
        // skew the ratio; interleaved rounds and the minimum absorb the rest.
        let (mut best_fast, mut best_plain) = (Duration::MAX, Duration::MAX);
        for _ in 0..SPEEDUP_ROUNDS {
            let (t, a) = time(&fast);
            let (u, b) = time(&plain);
            pass &= a == b;
            best_fast = best_fast.min(t);
            best_plain = best_plain.min(u);
        }
        let ratio = best_plain.as_secs_f64() / best_fast.as_secs_f64();
        pass &= ratio >= SPEEDUP_TARGET;
        detail.push(format!(
            "{group}: {:.3} s vs {:.3} s, {ratio:.1}x",
            best_fast.as_secs_f64(),
            best_plain.as_secs_f64()
        ));
    }
    report(pass, format!("{} graphs; {}", graphs.len(), detail.join("; ")))
}

fn criterion_8(ledger: &Ledger) -> Report {
    let dir = tempfile::tempdir().unwrap();
    let graph_path = dir.path().join("g.txt");
    let cert_path = dir.path().join("v.json");
    let mut failures = 0;
    let mut seen = HashSet::new();
    for (g, group, v) in &ledger.no_verdicts {
        let text = g.to_edgelist();
        let json = VerdictJson::new(text.clone(), g, group, v.clone()).unwrap();
        let body = serde_json::to_string(&json).unwrap();
        if !seen.insert((group.name(), body.clone())) {
            continue;
        }
        fs::write(&graph_path, &text).unwrap();
        fs::write(&cert_path, body).unwrap();
        let args = [
            "groupcon",
            "certify",
            "--format",
            "edgelist",
            "--graph",
            graph_path.to_str().unwrap(),
            "--group",
            &group.name(),
            "--certificate",
            cert_path.to_str().unwrap(),
        ];
        if run(args, &mut Vec::new(), &mut Vec::new()) != EXIT_YES {
            failures += 1;
        }
    }
    report(
        failures == 0 && !seen.is_empty(),
        format!("{} NO verdicts, {} distinct, {failures} rejected", ledger.no_verdicts.len(), seen.len()),
    )
}

fn main() {
    // Cargo runs integration tests from the package root.
    assert!(Path::new("Cargo.toml").exists());
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let wanted = |n: usize| filter.is_empty() || filter.iter().any(|f| f == &n.to_string());
    let mut ledger = Ledger::default();
    let mut failed = 0;
    let mut line = |n: usize, name: &str, r: Report| {
        if !r.pass {
            failed += 1;
        }
        let mut err = std::io::stderr().lock();
        writeln!(err, "criterion {n} {name}: {} ({})", if r.pass { "PASS" } else { "FAIL" }, r.detail).unwrap();
    };
    if wanted(1) {
        line(1, "oracle equivalence", criterion_1(&mut ledger));
    }
    if wanted(2) {
        line(2, "cycle law", criterion_2(&mut ledger));
    }
    if wanted(3) {
        line(3, "dense graphs connected", criterion_3(&mut ledger));
    }
    if wanted(4) {
        line(4, "nowhere-zero flows by order", criterion_4());
    }
    if wanted(5) {
        line(5, "cube witness z4 yes z2^2 no", criterion_5(&mut ledger));
    }
    if wanted(6) {
        line(6, "cubic 12 witness z2^2 yes z4 no", criterion_6(&mut ledger));
    }
    if wanted(7) {
        line(7, "thread speedup", criterion_7());
    }
    if wanted(8) {
        line(8, "certificate round trip", criterion_8(&ledger));
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
