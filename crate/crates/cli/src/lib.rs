//! Command-line front end for the network-formation laboratory:
//! reproducible parameter sweeps, single trajectories, stable-region
//! comparison grids, exhaustive verification reports, price-of-stability
//! grids, and stand-alone classification.
//!
//! Every data output is CSV (UTF-8, LF line endings, headers mandatory);
//! each invocation also echoes its effective settings into `manifest.txt`
//! in the output directory so any result can be traced back to the exact
//! configuration that produced it. Grid values are carried as exact
//! rationals from the flag text to the output files, and run seeds derive
//! deterministically from the master seed, so identical settings give
//! byte-identical outputs regardless of worker count.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use rayon::prelude::*;

use netform::classifier::{classify, Classification, ClassifierConfig, ALL_LABELS};
use netform::dynamics::{aggregate_runs, derive_seed, run_batch_runs, run_once, SimConfig};
use netform::graph::pair_count;
use netform::oracle::{enumerate, verify_predictions};
use netform::payoff::{parse_rational, Params};
use netform::pos::{pos_grid, PosMethod, PosValue};
use netform::stability::{predicted_stable_topologies, Topology};
use netform::{BigRational, Graph, Rational64};

/// Failure modes, one per process exit code: 1 for bad flags, config
/// entries, or input file contents; 2 for filesystem trouble; 3 for a
/// broken internal invariant.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Internal(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "{m}"),
            CliError::Internal(m) => write!(f, "internal invariant violated: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

/// Exact text form of a rational: an integer, a terminating decimal when
/// the reduced denominator divides a power of ten, and `n/d` otherwise.
/// Never rounds, so every value written can be parsed back exactly.
pub fn format_rational(r: Rational64) -> String {
    format_big(&BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom())))
}

/// See [`format_rational`]; arbitrary-precision variant for batch means.
pub fn format_big(r: &BigRational) -> String {
    let zero = BigInt::from(0);
    let one = BigInt::from(1);
    if *r.denom() == one {
        return r.numer().to_string();
    }
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let ten = BigInt::from(10);
    let mut rest = r.denom().clone();
    let mut twos = 0usize;
    let mut fives = 0usize;
    while &rest % &two == zero {
        rest /= &two;
        twos += 1;
    }
    while &rest % &five == zero {
        rest /= &five;
        fives += 1;
    }
    if rest != one {
        return r.to_string();
    }
    let places = twos.max(fives);
    let negative = *r.numer() < zero;
    let magnitude = if negative { -r.numer() } else { r.numer().clone() };
    let mut scale = BigInt::from(1);
    for _ in 0..places {
        scale *= &ten;
    }
    // Exact by construction: denom divides magnitude * 10^places.
    let mut digits = (magnitude * scale / r.denom()).to_string();
    while digits.len() <= places {
        digits.insert(0, '0');
    }
    digits.insert(digits.len() - places, '.');
    if negative {
        digits.insert(0, '-');
    }
    digits
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Parse a `key=value` configuration file: one entry per line, `#` starts
/// a comment, blank lines ignored, later entries override earlier ones.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected key=value, got {raw:?}", idx + 1))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// The accepted configuration keys; they mirror the long flag names.
pub const CONFIG_KEYS: [&str; 16] = [
    "n",
    "delta",
    "cost",
    "density",
    "delta-range",
    "cost-range",
    "step",
    "densities",
    "reps",
    "seed",
    "max-iters",
    "idle-terminate",
    "allow-indifferent-adds",
    "workers",
    "oracle",
    "out",
];

/// Settings as raw flag text, before validation. Flags fill this directly;
/// [`apply_config`] fills whatever the flags left unset, so flags win.
#[derive(Debug, Default, Clone)]
pub struct RawSettings {
    pub n: Option<String>,
    pub delta: Option<String>,
    pub cost: Option<String>,
    pub density: Option<String>,
    pub delta_range: Option<String>,
    pub cost_range: Option<String>,
    pub step: Option<String>,
    pub densities: Option<String>,
    pub reps: Option<String>,
    pub seed: Option<String>,
    pub max_iters: Option<String>,
    pub idle_terminate: Option<String>,
    pub allow_indifferent_adds: Option<bool>,
    pub workers: Option<String>,
    pub oracle: Option<bool>,
    pub out: Option<String>,
}

fn parse_flag_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        _ => Err(CliError::Usage(format!("{key} must be true or false, got {value:?}"))),
    }
}

/// Fold a parsed config file underneath explicitly given flags.
pub fn apply_config(
    mut raw: RawSettings,
    file: &BTreeMap<String, String>,
) -> Result<RawSettings, CliError> {
    for key in file.keys() {
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!("unknown config key {key:?}")));
        }
    }
    let get = |k: &str| file.get(k).cloned();
    raw.n = raw.n.or_else(|| get("n"));
    raw.delta = raw.delta.or_else(|| get("delta"));
    raw.cost = raw.cost.or_else(|| get("cost"));
    raw.density = raw.density.or_else(|| get("density"));
    raw.delta_range = raw.delta_range.or_else(|| get("delta-range"));
    raw.cost_range = raw.cost_range.or_else(|| get("cost-range"));
    raw.step = raw.step.or_else(|| get("step"));
    raw.densities = raw.densities.or_else(|| get("densities"));
    raw.reps = raw.reps.or_else(|| get("reps"));
    raw.seed = raw.seed.or_else(|| get("seed"));
    raw.max_iters = raw.max_iters.or_else(|| get("max-iters"));
    raw.idle_terminate = raw.idle_terminate.or_else(|| get("idle-terminate"));
    raw.workers = raw.workers.or_else(|| get("workers"));
    raw.out = raw.out.or_else(|| get("out"));
    if raw.allow_indifferent_adds.is_none() {
        if let Some(v) = file.get("allow-indifferent-adds") {
            raw.allow_indifferent_adds = Some(parse_flag_bool("allow-indifferent-adds", v)?);
        }
    }
    if raw.oracle.is_none() {
        if let Some(v) = file.get("oracle") {
            raw.oracle = Some(parse_flag_bool("oracle", v)?);
        }
    }
    Ok(raw)
}

/// Validated settings with defaults filled in. The defaults reproduce the
/// reference simulation table: sizes 3, 4, 5, 10, 20; both parameter axes
/// 0.05 to 1 in steps of 0.05; initial densities 0, 0.35 and 0.7; 100
/// repetitions; a 1000-iteration cap with a 30-iteration idle cutoff.
#[derive(Debug, Clone)]
pub struct Settings {
    pub n_list: Vec<usize>,
    pub delta_range: (Rational64, Rational64),
    pub cost_range: (Rational64, Rational64),
    pub step: Rational64,
    /// Benefit axis spelled out: `delta_range` swept by `step`.
    pub deltas: Vec<Rational64>,
    pub costs: Vec<Rational64>,
    pub densities: Vec<Rational64>,
    pub reps: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub idle_terminate: usize,
    pub allow_indifferent_adds: bool,
    /// None means one worker per available core.
    pub workers: Option<usize>,
    pub oracle: bool,
    pub out: PathBuf,
    /// Single-cell benefit/cost, used by `run` and the `atlas` cell dump.
    pub delta: Option<Rational64>,
    pub cost: Option<Rational64>,
    pub density: Rational64,
}

fn parse_rat(key: &str, text: &str) -> Result<Rational64, CliError> {
    parse_rational(text).map_err(|e| CliError::Usage(format!("{key}: {e}")))
}

fn parse_range(key: &str, text: &str) -> Result<(Rational64, Rational64), CliError> {
    match text.split_once(':') {
        Some((a, b)) => Ok((parse_rat(key, a)?, parse_rat(key, b)?)),
        None => {
            let v = parse_rat(key, text)?;
            Ok((v, v))
        }
    }
}

fn parse_count(key: &str, text: &str) -> Result<usize, CliError> {
    text.parse::<usize>()
        .map_err(|_| CliError::Usage(format!("{key} must be a non-negative integer, got {text:?}")))
}

/// Grid axis `start, start+step, ...` capped at `end`; all values must lie
/// in (0, 1].
pub fn axis(range: (Rational64, Rational64), step: Rational64) -> Result<Vec<Rational64>, CliError> {
    let zero = Rational64::from_integer(0);
    let one = Rational64::from_integer(1);
    if step <= zero {
        return Err(CliError::Usage(format!("step must be positive, got {step}")));
    }
    if range.0 <= zero || range.1 > one || range.0 > range.1 {
        return Err(CliError::Usage(format!(
            "range must satisfy 0 < start <= end <= 1, got {}:{}",
            range.0, range.1
        )));
    }
    let mut out = Vec::new();
    let mut v = range.0;
    while v <= range.1 {
        out.push(v);
        v += step;
    }
    Ok(out)
}

/// Validate raw settings and fill in the defaults.
pub fn resolve(raw: &RawSettings) -> Result<Settings, CliError> {
    let zero = Rational64::from_integer(0);
    let one = Rational64::from_integer(1);

    let n_text = raw.n.as_deref().unwrap_or("3,4,5,10,20");
    let mut n_list = Vec::new();
    for part in n_text.split(',') {
        let n = parse_count("n", part.trim())?;
        if !(2..=64).contains(&n) {
            return Err(CliError::Usage(format!("n must lie in 2..=64, got {n}")));
        }
        n_list.push(n);
    }

    // Unset ranges anchor at the step so the axis is the multiples of the
    // step in (0, 1], matching the analytic layers' grid convention.
    let step = parse_rat("step", raw.step.as_deref().unwrap_or("1/20"))?;
    let delta_range = match raw.delta_range.as_deref() {
        Some(text) => parse_range("delta-range", text)?,
        None => (step, one),
    };
    let cost_range = match raw.cost_range.as_deref() {
        Some(text) => parse_range("cost-range", text)?,
        None => (step, one),
    };
    let deltas = axis(delta_range, step)?;
    let costs = axis(cost_range, step)?;

    let densities_text = raw.densities.as_deref().unwrap_or("0,0.35,0.7");
    let mut densities = Vec::new();
    for part in densities_text.split(',') {
        let d = parse_rat("densities", part.trim())?;
        if d < zero || d > one {
            return Err(CliError::Usage(format!("density must lie in [0, 1], got {d}")));
        }
        densities.push(d);
    }

    let reps = parse_count("reps", raw.reps.as_deref().unwrap_or("100"))?;
    if reps == 0 {
        return Err(CliError::Usage("reps must be at least 1".into()));
    }
    let seed = raw
        .seed
        .as_deref()
        .unwrap_or("0")
        .parse::<u64>()
        .map_err(|_| CliError::Usage(format!("seed must be a u64, got {:?}", raw.seed)))?;
    let max_iters = parse_count("max-iters", raw.max_iters.as_deref().unwrap_or("1000"))?;
    let idle_terminate =
        parse_count("idle-terminate", raw.idle_terminate.as_deref().unwrap_or("30"))?;
    if max_iters == 0 || idle_terminate == 0 {
        return Err(CliError::Usage("max-iters and idle-terminate must be at least 1".into()));
    }
    let workers = match raw.workers.as_deref() {
        None => None,
        Some(text) => {
            let w = parse_count("workers", text)?;
            if w == 0 {
                return Err(CliError::Usage("workers must be at least 1".into()));
            }
            Some(w)
        }
    };

    let delta = raw.delta.as_deref().map(|t| parse_rat("delta", t)).transpose()?;
    let cost = raw.cost.as_deref().map(|t| parse_rat("cost", t)).transpose()?;
    let density = match raw.density.as_deref() {
        None => zero,
        Some(t) => {
            let d = parse_rat("density", t)?;
            if d < zero || d > one {
                return Err(CliError::Usage(format!("density must lie in [0, 1], got {d}")));
            }
            d
        }
    };

    Ok(Settings {
        n_list,
        delta_range,
        cost_range,
        step,
        deltas,
        costs,
        densities,
        reps,
        seed,
        max_iters,
        idle_terminate,
        allow_indifferent_adds: raw.allow_indifferent_adds.unwrap_or(false),
        workers,
        oracle: raw.oracle.unwrap_or(false),
        out: PathBuf::from(raw.out.as_deref().unwrap_or("out")),
        delta,
        cost,
        density,
    })
}

fn sim_config(s: &Settings, n: usize, density: Rational64, p: Params) -> SimConfig {
    let mut cfg = SimConfig::new(n, density, p, s.seed);
    cfg.max_iterations = s.max_iters;
    cfg.idle_terminate = s.idle_terminate;
    cfg.repetitions = s.reps;
    cfg.allow_indifferent_adds = s.allow_indifferent_adds;
    cfg
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

fn ensure_out_dir(s: &Settings) -> Result<(), CliError> {
    fs::create_dir_all(&s.out)
        .map_err(|e| CliError::Io(format!("creating {}: {e}", s.out.display())))
}

fn run_pooled<T: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| CliError::Internal(format!("building worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn join_list<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Effective settings in fixed order, fractions spelled exactly, no
/// timestamps: identical invocations give identical manifests.
pub fn manifest_text(command: &str, s: &Settings) -> String {
    let mut out = String::new();
    let mut push = |k: &str, v: String| {
        out.push_str(k);
        out.push('=');
        out.push_str(&v);
        out.push('\n');
    };
    push("command", command.to_string());
    push("n", join_list(&s.n_list));
    push("delta-range", format!("{}:{}", s.delta_range.0, s.delta_range.1));
    push("cost-range", format!("{}:{}", s.cost_range.0, s.cost_range.1));
    push("step", s.step.to_string());
    push("densities", join_list(&s.densities));
    if let Some(d) = s.delta {
        push("delta", d.to_string());
    }
    if let Some(c) = s.cost {
        push("cost", c.to_string());
    }
    push("density", s.density.to_string());
    push("reps", s.reps.to_string());
    push("seed", s.seed.to_string());
    push("max-iters", s.max_iters.to_string());
    push("idle-terminate", s.idle_terminate.to_string());
    push("allow-indifferent-adds", s.allow_indifferent_adds.to_string());
    push("workers", s.workers.map_or_else(|| "auto".to_string(), |w| w.to_string()));
    push("oracle", s.oracle.to_string());
    push("out", s.out.display().to_string());
    out
}

fn write_manifest(command: &str, s: &Settings) -> Result<(), CliError> {
    write_file(&s.out.join("manifest.txt"), &manifest_text(command, s))
}

/// The sweep CSV header: cell coordinates, batch statistics, then one
/// count column per class label in declaration order.
pub fn sweep_header() -> String {
    let mut h = String::from(
        "delta,cost,density,n,reps,modal_class,mean_utility,mean_iterations,mean_acts,mean_final_clustering",
    );
    for label in ALL_LABELS {
        h.push_str(",freq_");
        h.push_str(&label.as_str().replace('-', "_"));
    }
    h
}

pub struct SweepSummary {
    pub rows: usize,
    pub csv_path: PathBuf,
}

/// One batch per (n, density, delta, cost) cell; one CSV row per cell in
/// that nesting order. Cells are dispatched to the worker pool but rows
/// are emitted in cell order, and every run's seed depends only on the
/// master seed, the cell index, and the repetition index.
pub fn cmd_sweep(s: &Settings) -> Result<SweepSummary, CliError> {
    ensure_out_dir(s)?;
    let mut cells = Vec::new();
    for &n in &s.n_list {
        for &density in &s.densities {
            for &delta in &s.deltas {
                for &cost in &s.costs {
                    cells.push((n, density, delta, cost));
                }
            }
        }
    }
    let rows: Vec<String> = run_pooled(s.workers, || {
        cells
            .par_iter()
            .enumerate()
            .map(|(idx, &(n, density, delta, cost))| {
                let p = Params::new_inclusive(delta, cost).expect("axis values lie in (0, 1]");
                let cfg = sim_config(s, n, density, p.clone());
                let runs = run_batch_runs(&cfg, idx as u64);
                let stats = aggregate_runs(&runs, &p);
                let mut row = format!(
                    "{},{},{},{},{},{},{},{},{},{}",
                    format_rational(delta),
                    format_rational(cost),
                    format_rational(density),
                    n,
                    s.reps,
                    stats.modal_class.as_str(),
                    format_big(&stats.mean_utility),
                    format_big(&stats.mean_iterations),
                    format_big(&stats.mean_acts),
                    format_big(&stats.mean_final_clustering),
                );
                for label in ALL_LABELS {
                    let count = stats.class_frequencies.get(&label).copied().unwrap_or(0);
                    row.push(',');
                    row.push_str(&count.to_string());
                }
                row
            })
            .collect()
    })?;
    let mut csv = sweep_header();
    csv.push('\n');
    for row in &rows {
        csv.push_str(row);
        csv.push('\n');
    }
    let csv_path = s.out.join("sweep.csv");
    write_file(&csv_path, &csv)?;
    write_manifest("sweep", s)?;
    Ok(SweepSummary { rows: rows.len(), csv_path })
}

pub struct RunOutcome {
    pub converged: bool,
    pub dynamic_equilibrium: bool,
    pub iterations_used: usize,
    pub acts: usize,
    pub classification: Classification,
}

fn single_n(s: &Settings) -> Result<usize, CliError> {
    match s.n_list.as_slice() {
        [n] => Ok(*n),
        _ => Err(CliError::Usage(format!(
            "this command takes a single --n, got {}",
            join_list(&s.n_list)
        ))),
    }
}

fn require_cell(s: &Settings) -> Result<Params, CliError> {
    match (s.delta, s.cost) {
        (Some(d), Some(c)) => Params::new_inclusive(d, c).map_err(|e| CliError::Usage(e.to_string())),
        _ => Err(CliError::Usage("--delta and --cost are required".into())),
    }
}

/// One seeded trajectory (repetition 0 of cell 0). Writes `trajectory.csv`
/// (iteration, clustering, utility) and `final_graph.txt` (the edge-list
/// format `classify` reads back).
pub fn cmd_run(s: &Settings) -> Result<RunOutcome, CliError> {
    let n = single_n(s)?;
    let p = require_cell(s)?;
    ensure_out_dir(s)?;
    let cfg = sim_config(s, n, s.density, p);
    let r = run_once(&cfg, derive_seed(s.seed, 0, 0));
    let mut csv = String::from("iteration,clustering,utility\n");
    for t in &r.trajectory {
        csv.push_str(&format!(
            "{},{},{}\n",
            t.iteration,
            format_rational(t.clustering),
            format_rational(t.utility)
        ));
    }
    write_file(&s.out.join("trajectory.csv"), &csv)?;
    write_file(&s.out.join("final_graph.txt"), &r.final_graph.to_edge_list())?;
    write_manifest("run", s)?;
    let classification = classify(&r.final_graph, &ClassifierConfig::default());
    Ok(RunOutcome {
        converged: r.converged,
        dynamic_equilibrium: r.dynamic_equilibrium,
        iterations_used: r.iterations_used,
        acts: r.acts,
        classification,
    })
}

/// Classify an edge-list file (the format `run` writes).
pub fn cmd_classify(path: &Path) -> Result<Classification, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    let g = Graph::from_edge_list(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(classify(&g, &ClassifierConfig::default()))
}

/// The standard structures tracked by `regions`, with their file slugs.
const STRUCTURES: [(Topology, &str); 6] = [
    (Topology::Complete, "complete"),
    (Topology::Null, "null"),
    (Topology::Cycle, "cycle"),
    (Topology::CompleteBipartite, "bipartite_complete"),
    (Topology::CompleteEquiTriPartite, "equi_tri_partite_complete"),
    (Topology::CompleteEquiKPartite, "equi_k_partite_complete"),
];

/// Whether the topology has an instance on `n` nodes under the same
/// conventions the verification layer instantiates (equi-partite classes
/// need at least two nodes; rings need at least four to be distinct from
/// the triangle).
fn constructible(t: Topology, n: usize) -> bool {
    match t {
        Topology::Complete => n >= 2,
        Topology::Null => true,
        Topology::Cycle => n >= 4,
        Topology::CompleteBipartite => n >= 4,
        Topology::CompleteEquiTriPartite => n % 3 == 0 && n / 3 >= 2,
        Topology::CompleteEquiKPartite => (2..=n / 2).any(|k| n % k == 0 && n / k >= 2),
    }
}

/// Class sizes (ascending) if `g` is complete multipartite: nodes sharing
/// a neighborhood form a class and every node is adjacent to exactly the
/// outside of its class. The null graph reports one class, the complete
/// graph all-singleton classes.
fn multipartite_class_sizes(g: &Graph) -> Option<Vec<usize>> {
    let n = g.node_count();
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut classes: BTreeMap<u64, u64> = BTreeMap::new();
    for i in 0..n {
        *classes.entry(g.neighbors_mask(i)).or_insert(0) |= 1u64 << i;
    }
    let mut sizes = Vec::with_capacity(classes.len());
    for (mask, members) in &classes {
        if *mask != full & !members {
            return None;
        }
        sizes.push(members.count_ones() as usize);
    }
    sizes.sort_unstable();
    Some(sizes)
}

fn is_single_cycle(g: &Graph) -> bool {
    let n = g.node_count();
    if n < 3 || (0..n).any(|i| g.degree(i) != 2) {
        return false;
    }
    // 2-regular and connected is exactly one spanning cycle.
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut reached = 1;
    while let Some(v) = stack.pop() {
        for w in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                reached += 1;
                stack.push(w);
            }
        }
    }
    reached == n
}

/// Which of the six standard structures `g` instantiates, in
/// [`STRUCTURES`] order.
fn observed_structures(g: &Graph) -> [bool; 6] {
    let n = g.node_count();
    let e = g.edge_count();
    let (bipartite, equi_tri, equi_k) = match multipartite_class_sizes(g) {
        Some(sizes) => {
            let equal = sizes.iter().all(|&a| a == sizes[0]);
            (
                sizes.len() == 2,
                sizes.len() == 3 && equal && sizes[0] >= 2,
                sizes.len() >= 2 && equal && sizes[0] >= 2,
            )
        }
        None => (false, false, false),
    };
    [e == pair_count(n), e == 0, is_single_cycle(g), bipartite, equi_tri, equi_k]
}

/// Simulated versus analytic stable regions. For each size and structure,
/// a cell is observed when any repetition at any density settles into the
/// structure (regions merged across densities), and predicted when the
/// closed-form region table names it. A match means the two agree; a
/// predicted-but-unobserved cell is information, not an error, since the
/// dynamics may simply never reach a stable topology, and observed-but-
/// unpredicted cells are expected where the analytic conditions are
/// sufficient only.
pub fn cmd_regions(s: &Settings) -> Result<Vec<PathBuf>, CliError> {
    ensure_out_dir(s)?;
    let mut files = Vec::new();
    for &n in &s.n_list {
        let mut cells = Vec::new();
        for &density in &s.densities {
            for &delta in &s.deltas {
                for &cost in &s.costs {
                    cells.push((density, delta, cost));
                }
            }
        }
        let per_cell: Vec<[bool; 6]> = run_pooled(s.workers, || {
            cells
                .par_iter()
                .enumerate()
                .map(|(idx, &(density, delta, cost))| {
                    let p = Params::new_inclusive(delta, cost).expect("axis values lie in (0, 1]");
                    let runs = run_batch_runs(&sim_config(s, n, density, p), idx as u64);
                    let mut flags = [false; 6];
                    for r in &runs {
                        for (acc, v) in flags.iter_mut().zip(observed_structures(&r.final_graph)) {
                            *acc |= v;
                        }
                    }
                    flags
                })
                .collect()
        })?;
        let grid = s.deltas.len() * s.costs.len();
        let mut union = vec![[false; 6]; grid];
        for (idx, flags) in per_cell.iter().enumerate() {
            for (acc, v) in union[idx % grid].iter_mut().zip(flags) {
                *acc |= *v;
            }
        }
        for (si, &(topology, slug)) in STRUCTURES.iter().enumerate() {
            let mut csv = String::from("delta,cost,observed,predicted,match\n");
            for (di, &delta) in s.deltas.iter().enumerate() {
                for (ci, &cost) in s.costs.iter().enumerate() {
                    let p = Params::new_inclusive(delta, cost).expect("axis values lie in (0, 1]");
                    let predicted = constructible(topology, n)
                        && predicted_stable_topologies(&p).topologies.contains(&topology);
                    let observed = union[di * s.costs.len() + ci][si];
                    csv.push_str(&format!(
                        "{},{},{},{},{}\n",
                        format_rational(delta),
                        format_rational(cost),
                        observed as u8,
                        predicted as u8,
                        (observed == predicted) as u8
                    ));
                }
            }
            let path = s.out.join(format!("regions_n{n}_{slug}.csv"));
            write_file(&path, &csv)?;
            files.push(path);
        }
    }
    write_manifest("regions", s)?;
    Ok(files)
}

pub struct AtlasSummary {
    pub claims: usize,
    pub failures: usize,
    pub cell_dump: Option<PathBuf>,
}

/// Exhaustive verification report for one small size: every analytic
/// claim checked against full enumeration on the grid (`claims.csv` and
/// `summary.txt`), plus, when `--delta`/`--cost` name a cell, the complete
/// stable set of that cell (`cell.txt`).
pub fn cmd_atlas(s: &Settings) -> Result<AtlasSummary, CliError> {
    let n = single_n(s)?;
    ensure_out_dir(s)?;
    let records = verify_predictions(n, s.step).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut csv = String::from("delta,cost,claim,pass,witness\n");
    let mut failures = 0usize;
    let mut failure_lines = String::new();
    for r in &records {
        if !r.pass {
            failures += 1;
            failure_lines.push_str(&format!(
                "FAIL delta={} cost={} {} ({})\n",
                format_rational(r.delta),
                format_rational(r.cost),
                r.claim,
                r.witness.as_deref().unwrap_or("no witness")
            ));
        }
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            format_rational(r.delta),
            format_rational(r.cost),
            csv_field(&r.claim.to_string()),
            r.pass as u8,
            csv_field(r.witness.as_deref().unwrap_or(""))
        ));
    }
    write_file(&s.out.join("claims.csv"), &csv)?;
    let summary = format!(
        "n={n}\nstep={}\nclaims={}\nfailures={failures}\n{failure_lines}",
        s.step,
        records.len()
    );
    write_file(&s.out.join("summary.txt"), &summary)?;
    let cell_dump = match (s.delta, s.cost) {
        (Some(d), Some(c)) => {
            let p = Params::new_inclusive(d, c).map_err(|e| CliError::Usage(e.to_string()))?;
            let result = enumerate(n, &p).map_err(|e| CliError::Usage(e.to_string()))?;
            let path = s.out.join("cell.txt");
            write_file(&path, &result.dump())?;
            Some(path)
        }
        _ => None,
    };
    write_manifest("atlas", s)?;
    Ok(AtlasSummary { claims: records.len(), failures, cell_dump })
}

/// Price-of-stability grid over the interior of the parameter square.
/// Kind is EXACT, LB (proven lower bound on the true ratio), or UNDEF
/// (no positive-utility stable graph exists to compare against).
pub fn cmd_pos(s: &Settings) -> Result<(PathBuf, usize), CliError> {
    let n = single_n(s)?;
    let steps = Rational64::from_integer(1) / s.step;
    if !steps.is_integer() {
        return Err(CliError::Usage(format!("step must divide 1 exactly, got {}", s.step)));
    }
    let method = if s.oracle { PosMethod::Oracle } else { PosMethod::ClosedForm };
    let cells = pos_grid(n, s.step, method).map_err(|e| CliError::Usage(e.to_string()))?;
    ensure_out_dir(s)?;
    let mut csv = String::from("delta,cost,kind,value\n");
    for (delta, cost, verdict) in &cells {
        let (kind, value) = match verdict.value {
            PosValue::Exact(r) => ("EXACT", format_rational(r)),
            PosValue::LowerBound(r) => ("LB", format_rational(r)),
            PosValue::Undefined => ("UNDEF", String::new()),
        };
        csv.push_str(&format!(
            "{},{},{kind},{value}\n",
            format_rational(*delta),
            format_rational(*cost)
        ));
    }
    let path = s.out.join("pos.csv");
    write_file(&path, &csv)?;
    write_manifest("pos", s)?;
    Ok((path, cells.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use netform::payoff::grid_values;
    use netform::StandardKind;

    fn rat(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn settings(raw: RawSettings) -> Settings {
        resolve(&raw).unwrap()
    }

    #[test]
    fn rationals_format_exactly_and_reversibly() {
        for (r, want) in [
            (rat(1, 20), "0.05"),
            (rat(7, 10), "0.7"),
            (rat(1, 1), "1"),
            (rat(0, 1), "0"),
            (rat(-3, 2), "-1.5"),
            (rat(1, 3), "1/3"),
            (rat(-5, 7), "-5/7"),
            (rat(123, 8), "15.375"),
        ] {
            let text = format_rational(r);
            assert_eq!(text, want);
            assert_eq!(parse_rational(&text).unwrap(), r);
        }
        let mean = BigRational::new(BigInt::from(137), BigInt::from(40));
        assert_eq!(format_big(&mean), "3.425");
        assert_eq!(format_big(&BigRational::new(BigInt::from(-1), BigInt::from(6))), "-1/6");
    }

    #[test]
    fn default_axes_match_the_reference_grid() {
        let s = settings(RawSettings::default());
        assert_eq!(s.n_list, vec![3, 4, 5, 10, 20]);
        assert_eq!(s.deltas, grid_values(rat(1, 20)));
        assert_eq!(s.costs, grid_values(rat(1, 20)));
        assert_eq!(s.densities, vec![rat(0, 1), rat(7, 20), rat(7, 10)]);
        assert_eq!(s.reps, 100);
        assert_eq!(s.max_iters, 1000);
        assert_eq!(s.idle_terminate, 30);
        assert!(!s.allow_indifferent_adds);
        assert_eq!(s.out, PathBuf::from("out"));

        // A coarser step re-anchors the default axes at its multiples.
        let coarse = settings(RawSettings { step: Some("1/4".into()), ..RawSettings::default() });
        assert_eq!(coarse.deltas, grid_values(rat(1, 4)));
        assert_eq!(coarse.costs, grid_values(rat(1, 4)));
        // An explicit range still wins over the anchor.
        let ranged = settings(RawSettings {
            step: Some("1/4".into()),
            delta_range: Some("0.05:0.55".into()),
            ..RawSettings::default()
        });
        assert_eq!(ranged.deltas, vec![rat(1, 20), rat(3, 10), rat(11, 20)]);
    }

    #[test]
    fn axis_rejects_out_of_range_grids() {
        assert!(axis((rat(0, 1), rat(1, 1)), rat(1, 20)).is_err());
        assert!(axis((rat(1, 20), rat(21, 20)), rat(1, 20)).is_err());
        assert!(axis((rat(1, 2), rat(1, 4)), rat(1, 20)).is_err());
        assert!(axis((rat(1, 2), rat(1, 2)), rat(0, 1)).is_err());
        assert_eq!(axis((rat(1, 2), rat(1, 2)), rat(1, 20)).unwrap(), vec![rat(1, 2)]);
        // A step that overshoots the end still yields the start point.
        assert_eq!(axis((rat(3, 4), rat(1, 1)), rat(1, 2)).unwrap(), vec![rat(3, 4)]);
    }

    #[test]
    fn config_files_parse_and_flags_override_them() {
        let text = "# comment\nn = 4\nseed=9\n\nreps=7 # trailing\nreps=8\n";
        let file = parse_config(text).unwrap();
        assert_eq!(file.get("n").map(String::as_str), Some("4"));
        assert_eq!(file.get("reps").map(String::as_str), Some("8"));

        let raw = apply_config(
            RawSettings { n: Some("6".into()), ..RawSettings::default() },
            &file,
        )
        .unwrap();
        let s = settings(raw);
        assert_eq!(s.n_list, vec![6]);
        assert_eq!(s.seed, 9);
        assert_eq!(s.reps, 8);

        assert!(parse_config("just words\n").is_err());
        let bad = parse_config("mystery=1\n").unwrap();
        assert!(apply_config(RawSettings::default(), &bad).is_err());
        let flag = parse_config("allow-indifferent-adds=true\n").unwrap();
        assert!(settings(apply_config(RawSettings::default(), &flag).unwrap())
            .allow_indifferent_adds);
    }

    #[test]
    fn resolve_rejects_invalid_values() {
        for (field, value) in [
            ("n", "1"),
            ("n", "65"),
            ("n", "x"),
            ("reps", "0"),
            ("seed", "-1"),
            ("workers", "0"),
            ("densities", "1.5"),
            ("density", "-0.1"),
            ("step", "0"),
        ] {
            let mut raw = RawSettings::default();
            match field {
                "n" => raw.n = Some(value.into()),
                "reps" => raw.reps = Some(value.into()),
                "seed" => raw.seed = Some(value.into()),
                "workers" => raw.workers = Some(value.into()),
                "densities" => raw.densities = Some(value.into()),
                "density" => raw.density = Some(value.into()),
                "step" => raw.step = Some(value.into()),
                _ => unreachable!(),
            }
            let err = resolve(&raw).unwrap_err();
            assert_eq!(err.exit_code(), 1, "{field}={value}");
        }
    }

    #[test]
    fn csv_fields_quote_commas_and_quotes() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn sweep_header_lists_every_class_column() {
        let h = sweep_header();
        assert!(h.starts_with("delta,cost,density,n,reps,modal_class,mean_utility,"));
        assert_eq!(h.matches(",freq_").count(), ALL_LABELS.len());
        assert!(h.contains(",freq_BI_PARTITE_COMPLETE,"));
        assert!(h.ends_with(",freq_UNCLASSIFIED"));
        assert!(!h.contains('-'));
    }

    #[test]
    fn multipartite_detection_recovers_class_sizes() {
        let k33 = Graph::complete_multipartite(&[3, 3]).unwrap();
        assert_eq!(multipartite_class_sizes(&k33), Some(vec![3, 3]));
        let star = Graph::standard(StandardKind::Star, 5).unwrap();
        assert_eq!(multipartite_class_sizes(&star), Some(vec![1, 4]));
        let k333 = Graph::complete_multipartite(&[3, 3, 3]).unwrap();
        assert_eq!(multipartite_class_sizes(&k333), Some(vec![3, 3, 3]));
        assert_eq!(
            multipartite_class_sizes(&Graph::empty(4).unwrap()),
            Some(vec![4])
        );
        assert_eq!(
            multipartite_class_sizes(&Graph::standard(StandardKind::Complete, 4).unwrap()),
            Some(vec![1, 1, 1, 1])
        );
        let ring = Graph::standard(StandardKind::Cycle, 6).unwrap();
        assert_eq!(multipartite_class_sizes(&ring), None);
    }

    #[test]
    fn observed_structures_flag_the_right_shapes() {
        let order = |g: &Graph| observed_structures(g);
        let turan10 = Graph::turan(10).unwrap();
        assert_eq!(order(&turan10), [false, false, false, true, false, true]);
        let ring = Graph::standard(StandardKind::Cycle, 6).unwrap();
        assert_eq!(order(&ring), [false, false, true, false, false, false]);
        let k4 = Graph::standard(StandardKind::Complete, 4).unwrap();
        assert_eq!(order(&k4), [true, false, false, false, false, false]);
        let null = Graph::empty(5).unwrap();
        assert_eq!(order(&null), [false, true, false, false, false, false]);
        let k333 = Graph::complete_multipartite(&[3, 3, 3]).unwrap();
        assert_eq!(order(&k333), [false, false, false, false, true, true]);
        // Two disjoint triangles: 2-regular but not one cycle.
        let mut two = Graph::empty(6).unwrap();
        for (i, j) in [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)] {
            two.add_edge(i, j);
        }
        assert_eq!(order(&two), [false; 6]);
    }

    #[test]
    fn constructibility_mirrors_the_instantiation_policy() {
        assert!(!constructible(Topology::Cycle, 3));
        assert!(constructible(Topology::Cycle, 4));
        assert!(constructible(Topology::CompleteEquiTriPartite, 9));
        assert!(!constructible(Topology::CompleteEquiTriPartite, 10));
        assert!(!constructible(Topology::CompleteEquiKPartite, 7));
        assert!(constructible(Topology::CompleteEquiKPartite, 4));
        assert!(constructible(Topology::CompleteBipartite, 4));
        assert!(!constructible(Topology::CompleteBipartite, 3));
    }

    #[test]
    fn manifests_echo_resolved_settings_in_fixed_order() {
        let raw = RawSettings {
            n: Some("10".into()),
            seed: Some("42".into()),
            workers: Some("8".into()),
            delta: Some("0.5".into()),
            cost: Some("0.1".into()),
            ..RawSettings::default()
        };
        let text = manifest_text("run", &settings(raw));
        let expect = "command=run\nn=10\ndelta-range=1/20:1\ncost-range=1/20:1\nstep=1/20\n\
                      densities=0,7/20,7/10\ndelta=1/2\ncost=1/10\ndensity=0\nreps=100\nseed=42\n\
                      max-iters=1000\nidle-terminate=30\nallow-indifferent-adds=false\n\
                      workers=8\noracle=false\nout=out\n";
        assert_eq!(text, expect);
    }
}
