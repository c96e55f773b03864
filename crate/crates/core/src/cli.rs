//! The `hitmix` command-line tool.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::HitmixError;
use crate::graph::{load_edge_list, load_seed_list, Graph, Relabeler, SeedSet};
use crate::metrics::{adjusted_rand_index, precision_recall_f1};
use crate::mixture::{hitmix, FitSummary, HitmixConfig, LognormalParams};
use crate::moments::compute_moments;
use crate::sbm::{run_simulation, SimulationSpec};
use crate::solver::CgConfig;

#[derive(Debug, Parser)]
#[command(
    name = "hitmix",
    version,
    about = "Seed-set expansion from random-walk hitting times"
)]
struct Cli {
    /// Only log warnings and errors.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mean and variance of the hitting time to the seed set for every other vertex.
    Moments(MomentsArgs),
    /// Posterior probability that each vertex belongs with the seeds.
    Expand(ExpandArgs),
    /// Monte Carlo benchmark on stochastic block models.
    SbmSim(SbmSimArgs),
    /// Score predicted labels against ground truth.
    Eval(EvalArgs),
    /// Map arbitrary vertex names to dense integer ids.
    Relabel(RelabelArgs),
}

#[derive(Debug, Args)]
struct GraphInput {
    /// Edge list, one `u v` pair per line.
    #[arg(long)]
    graph: PathBuf,
    /// Seed vertex ids, one per line.
    #[arg(long)]
    seeds: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative residual tolerance of the conjugate gradient solves.
    #[arg(long)]
    cg_tol: Option<f64>,
}

#[derive(Debug, Args)]
struct MomentsArgs {
    #[command(flatten)]
    input: GraphInput,
}

#[derive(Debug, Args)]
struct MixtureArgs {
    /// Posterior threshold for goal-set membership.
    #[arg(long, default_value_t = 0.5)]
    tau: f64,
    /// Pseudo-samples drawn per vertex.
    #[arg(long)]
    samples_per_vertex: Option<usize>,
    /// Candidate component counts: a comma list or `auto`.
    #[arg(long)]
    clusters: Option<String>,
    /// Relative log-likelihood tolerance of EM.
    #[arg(long)]
    em_tol: Option<f64>,
    #[arg(long)]
    em_max_iters: Option<usize>,
    /// Random seed; a fresh one is drawn and printed when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Debug, Args)]
struct ExpandArgs {
    #[command(flatten)]
    input: GraphInput,
    #[command(flatten)]
    mixture: MixtureArgs,
}

#[derive(Debug, Args)]
struct SbmSimArgs {
    /// `key = value` experiment description.
    #[arg(long, required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in experiment: sim1, sim2 or sim3.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Output directory for `runs.csv` and `summary.csv`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Predicted labels: `vertex<TAB>...<TAB>label`, label 1 for the goal set.
    #[arg(long)]
    pred: PathBuf,
    /// Ground-truth labels in the same layout.
    #[arg(long)]
    truth: PathBuf,
}

#[derive(Debug, Args)]
struct RelabelArgs {
    /// Edge list with arbitrary whitespace-free vertex names.
    #[arg(long)]
    graph: PathBuf,
    /// Relabelled edge list.
    #[arg(long)]
    out: PathBuf,
    /// Name to id table.
    #[arg(long)]
    map: PathBuf,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(HitmixError),
}

impl From<HitmixError> for CliError {
    fn from(e: HitmixError) -> Self {
        match e {
            HitmixError::Parse { .. } => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit status: 0 on success, 1 on usage errors, 2 on runtime errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    init_logging(cli.quiet, matches!(cli.command, Command::SbmSim(_)));
    let outcome = match cli.command {
        Command::Moments(a) => moments_cmd(a),
        Command::Expand(a) => expand_cmd(a),
        Command::SbmSim(a) => sbm_cmd(a),
        Command::Eval(a) => eval_cmd(a),
        Command::Relabel(a) => relabel_cmd(a),
    };
    match outcome {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn init_logging(quiet: bool, batch: bool) {
    let level = if quiet {
        log::LevelFilter::Warn
    } else {
        log::LevelFilter::Info
    };
    let mut builder = env_logger::Builder::new();
    builder.filter_level(level).format_timestamp(None);
    if batch {
        // per-run solver and EM chatter would swamp a simulation log
        builder.filter_module("hitmix::moments", log::LevelFilter::Warn);
        builder.filter_module("hitmix::mixture", log::LevelFilter::Warn);
    }
    let _ = builder.try_init();
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: crate::Result<T>) -> CliResult<T> {
    r.map_err(|e| match e {
        HitmixError::Parse { line, message } => {
            CliError::Usage(format!("{}:{line}: {message}", path.display()))
        }
        other => CliError::Runtime(other),
    })
}

/// Writes through a temporary file in the destination directory, then renames.
fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io_err = |e: io::Error| CliError::Runtime(HitmixError::Io(e));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn emit(out: Option<&Path>, contents: &str) -> CliResult<()> {
    match out {
        Some(path) => write_atomic(path, contents.as_bytes()),
        None => io::stdout()
            .write_all(contents.as_bytes())
            .map_err(|e| CliError::Runtime(e.into())),
    }
}

fn load_inputs(input: &GraphInput) -> CliResult<(Graph, SeedSet)> {
    let start = Instant::now();
    let graph = with_path(&input.graph, load_edge_list(open(&input.graph)?))?;
    let seeds = with_path(&input.seeds, load_seed_list(open(&input.seeds)?))?;
    let seeds = SeedSet::new(seeds, graph.n_vertices())
        .map_err(|e| CliError::Usage(format!("{}: {e}", input.seeds.display())))?;
    log::info!(
        "loaded {} vertices, {} edges, {} seeds in {:.3?}",
        graph.n_vertices(),
        graph.n_edges(),
        seeds.members().len(),
        start.elapsed()
    );
    Ok((graph, seeds))
}

fn cg_config(tol: Option<f64>) -> CliResult<CgConfig<f64>> {
    let mut cfg = CgConfig::default();
    if let Some(t) = tol {
        cfg.rel_tol = t;
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "nan".into())
}

fn moments_cmd(a: MomentsArgs) -> CliResult<()> {
    let (graph, seeds) = load_inputs(&a.input)?;
    let cfg = cg_config(a.input.cg_tol)?;
    let start = Instant::now();
    let table = compute_moments(&graph, &seeds, 2, &cfg)?;
    for (m, s) in table.cg_stats.iter().enumerate() {
        log::info!(
            "moment {}: {} cg iterations, relative residual {:e}",
            m + 1,
            s.iterations,
            s.final_rel_residual
        );
    }
    log::info!("moments computed in {:.3?}", start.elapsed());
    let mut out = String::from("vertex_id\tmean\tvariance\treachable\n");
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            r.vertex,
            fmt_opt(r.mean()),
            fmt_opt(r.variance()),
            u8::from(r.reachable)
        );
    }
    emit(a.input.out.as_deref(), &out)
}

fn parse_clusters(s: &str) -> CliResult<Vec<usize>> {
    if s.trim() == "auto" {
        return Ok(vec![2, 3, 4, 5]);
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad --clusters entry {t:?}")))
        })
        .collect()
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("using seed {s}");
        s
    })
}

fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> CliResult<R> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Serialize)]
struct ExpandReport<'a> {
    selected_g: usize,
    goal_component: usize,
    tau: f64,
    seed: u64,
    samples_per_vertex: usize,
    unreachable: usize,
    bic: Vec<BicEntry>,
    components: &'a [LognormalParams<f64>],
    weights: &'a [f64],
    em_iterations: usize,
    fits: &'a [FitSummary<f64>],
}

#[derive(Serialize)]
struct BicEntry {
    g: usize,
    bic: f64,
}

fn expand_cmd(a: ExpandArgs) -> CliResult<()> {
    let (graph, seeds) = load_inputs(&a.input)?;
    let m = &a.mixture;
    let mut cfg = HitmixConfig {
        tau: m.tau,
        rng_seed: resolve_seed(m.seed),
        cg: cg_config(a.input.cg_tol)?,
        ..HitmixConfig::default()
    };
    if let Some(k) = m.samples_per_vertex {
        cfg.m = k;
    }
    if let Some(c) = &m.clusters {
        cfg.g_candidates = parse_clusters(c)?;
    }
    if let Some(t) = m.em_tol {
        cfg.em_rel_tol = t;
    }
    if let Some(n) = m.em_max_iters {
        cfg.em_max_iters = n;
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let start = Instant::now();
    let result = with_workers(m.workers, || hitmix(&graph, &seeds, &cfg))??;
    log::info!(
        "selected g = {}, goal set of {} vertices, in {:.3?}",
        result.selected_g,
        result.goal_set().len(),
        start.elapsed()
    );

    let mut out = String::from("vertex_id\tmean\tvariance\tposterior_goal\tlabel\n");
    for r in &result.rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            r.vertex,
            fmt_opt(r.mean),
            fmt_opt(r.variance),
            r.posterior,
            u8::from(r.in_goal)
        );
    }
    emit(a.input.out.as_deref(), &out)?;

    if let Some(path) = &a.input.out {
        let report = ExpandReport {
            selected_g: result.selected_g,
            goal_component: result.goal_component,
            tau: result.tau,
            seed: result.rng_seed,
            samples_per_vertex: cfg.m,
            unreachable: result.unreachable_count(),
            bic: result
                .bic_values()
                .into_iter()
                .map(|(g, bic)| BicEntry { g, bic })
                .collect(),
            components: &result.selected.components,
            weights: &result.selected.weights,
            em_iterations: result.selected.iterations,
            fits: &result.fits,
        };
        let json = serde_json::to_string_pretty(&report)
            .map_err(|e| CliError::Runtime(HitmixError::Io(e.into())))?;
        let mut sidecar = path.clone().into_os_string();
        sidecar.push(".json");
        write_atomic(Path::new(&sidecar), json.as_bytes())?;
    }
    Ok(())
}

fn sbm_cmd(a: SbmSimArgs) -> CliResult<()> {
    let mut spec = match (&a.config, a.preset.as_deref()) {
        (Some(path), _) => {
            let mut text = String::new();
            io::Read::read_to_string(&mut open(path)?, &mut text)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            SimulationSpec::from_config_str(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        (None, Some("sim1")) => SimulationSpec::simulation_1(),
        (None, Some("sim2")) => SimulationSpec::simulation_2(),
        (None, Some("sim3")) => SimulationSpec::simulation_3(),
        (None, other) => {
            return Err(CliError::Usage(format!(
                "unknown preset {:?}; expected sim1, sim2 or sim3",
                other.unwrap_or_default()
            )))
        }
    };
    if let Some(n) = a.mc_samples {
        spec.mc_samples = n;
    }
    if let Some(w) = a.workers {
        spec.workers = w;
    }
    if a.seed.is_some() || a.config.is_none() {
        spec.seed = resolve_seed(a.seed);
    }
    spec.validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    std::fs::create_dir_all(&a.out).map_err(|e| CliError::Runtime(e.into()))?;

    let start = Instant::now();
    let summary = run_simulation(&spec)?;
    log::info!(
        "{} runs over {} conditions in {:.3?}",
        summary.runs.len(),
        summary.conditions.len(),
        start.elapsed()
    );
    for c in &summary.conditions {
        log::info!(
            "{} = {}: ari {:.4} [{:.4}, {:.4}], f1 {:.4}, {} failures, {} disconnected",
            summary.sweep,
            c.condition,
            c.ari_mean,
            c.ari_p5,
            c.ari_p95,
            c.f1_mean,
            c.failures,
            c.disconnected_runs
        );
    }
    write_atomic(&a.out.join("runs.csv"), summary.runs_csv().as_bytes())?;
    write_atomic(&a.out.join("summary.csv"), summary.summary_csv().as_bytes())
}

/// Reads `vertex ... label` rows; a non-numeric first line is a header.
fn read_labels(path: &Path) -> CliResult<Vec<(usize, usize)>> {
    let mut rows = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| CliError::Runtime(e.into()))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parsed = match (fields.first(), fields.last()) {
            (Some(v), Some(l)) if fields.len() >= 2 => v.parse().ok().zip(l.parse().ok()),
            _ => None,
        };
        match parsed {
            Some(row) => rows.push(row),
            None if i == 0 => continue,
            None => {
                return Err(CliError::Usage(format!(
                    "{}:{}: expected `vertex label`, found {line:?}",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    if rows.is_empty() {
        return Err(CliError::Usage(format!("{}: no labels", path.display())));
    }
    Ok(rows)
}

#[derive(Serialize)]
struct EvalReport {
    ari: f64,
    precision: f64,
    recall: f64,
    f1: f64,
    n: usize,
}

fn eval_cmd(a: EvalArgs) -> CliResult<()> {
    let pred = read_labels(&a.pred)?;
    let truth: HashMap<usize, usize> = read_labels(&a.truth)?.into_iter().collect();
    let (mut p, mut t) = (Vec::new(), Vec::new());
    for (v, label) in &pred {
        if let Some(&l) = truth.get(v) {
            p.push((*v, *label));
            t.push((*v, l));
        }
    }
    if p.len() != pred.len() || p.len() != truth.len() {
        log::warn!(
            "{} predicted and {} true labels; scoring the {} shared vertices",
            pred.len(),
            truth.len(),
            p.len()
        );
    }
    let pl: Vec<usize> = p.iter().map(|x| x.1).collect();
    let tl: Vec<usize> = t.iter().map(|x| x.1).collect();
    let ari = adjusted_rand_index(&pl, &tl)?;
    let universe = p.iter().map(|x| x.0 + 1).max().unwrap_or(0);
    let positive = |rows: &[(usize, usize)]| {
        rows.iter()
            .filter(|r| r.1 == 1)
            .map(|r| r.0)
            .collect::<Vec<_>>()
    };
    let s = precision_recall_f1(positive(&p), positive(&t), universe);
    let report = EvalReport {
        ari,
        precision: s.precision,
        recall: s.recall,
        f1: s.f1,
        n: p.len(),
    };
    let json = serde_json::to_string(&report).expect("plain struct serializes");
    println!("{json}");
    Ok(())
}

fn relabel_cmd(a: RelabelArgs) -> CliResult<()> {
    let mut relabeler = Relabeler::default();
    let edges = with_path(&a.graph, relabeler.relabel_edges(open(&a.graph)?))?;
    let mut out = String::new();
    for (u, v) in &edges {
        let _ = writeln!(out, "{u} {v}");
    }
    let mut map = String::from("name\tid\n");
    for (id, name) in relabeler.names().iter().enumerate() {
        let _ = writeln!(map, "{name}\t{id}");
    }
    write_atomic(&a.out, out.as_bytes())?;
    write_atomic(&a.map, map.as_bytes())?;
    log::info!(
        "{} vertices, {} edges",
        relabeler.names().len(),
        edges.len()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cluster_lists() {
        assert_eq!(parse_clusters("auto").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_clusters("2, 3").unwrap(), vec![2, 3]);
        assert!(parse_clusters("2,x").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["hitmix", "moments", "--bogus"]), 1);
        assert_eq!(run(["hitmix"]), 1);
        assert_eq!(
            run([
                "hitmix",
                "moments",
                "--graph",
                "/nonexistent/g",
                "--seeds",
                "/nonexistent/s"
            ]),
            1
        );
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run(["hitmix", "--help"]), 0);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn label_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("l.tsv");
        std::fs::write(&p, "vertex_id\tlabel\n0\t1\n1\t0\n").unwrap();
        assert_eq!(read_labels(&p).unwrap(), vec![(0, 1), (1, 0)]);
        std::fs::write(&p, "0\t1\nx\ty\n").unwrap();
        assert!(matches!(read_labels(&p), Err(CliError::Usage(_))));
    }
}
