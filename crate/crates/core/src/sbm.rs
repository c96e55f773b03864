//! Stochastic block model sampling and the Monte Carlo harness that scores
//! seed-set expansion against planted blocks.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HitmixError, Result};
use crate::graph::{Graph, SeedSet};
use crate::metrics::{adjusted_rand_index, percentiles, precision_recall_f1, LabelVector};
use crate::mixture::{hitmix, HitmixConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbmConfig {
    pub n_blocks: usize,
    pub block_size: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub rng_seed: u64,
}

impl SbmConfig {
    pub fn n_vertices(&self) -> usize {
        self.n_blocks * self.block_size
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_blocks == 0 || self.block_size == 0 {
            return Err(HitmixError::InvalidArgument(
                "block model needs at least one non-empty block".into(),
            ));
        }
        for (name, p) in [("p_in", self.p_in), ("p_out", self.p_out)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(HitmixError::InvalidArgument(format!(
                    "{name} must lie in [0, 1], got {p}"
                )));
            }
        }
        Ok(())
    }

    /// Expected degree of any vertex.
    pub fn expected_degree(&self) -> f64 {
        (self.block_size - 1) as f64 * self.p_in
            + ((self.n_blocks - 1) * self.block_size) as f64 * self.p_out
    }

    pub fn sample(&self) -> Result<(Graph, Vec<usize>)> {
        sample_sbm(self, &mut ChaCha8Rng::seed_from_u64(self.rng_seed))
    }
}

/// Number of Bernoulli failures before the next success.
fn geometric_skip<R: Rng + ?Sized>(rng: &mut R, p: f64) -> u64 {
    if p >= 1.0 {
        return 0;
    }
    let u: f64 = rng.random();
    ((1.0 - u).ln() / (1.0 - p).ln()).floor() as u64
}

/// Samples an SBM graph and the block label of every vertex (`v / block_size`).
///
/// Every unordered pair of distinct vertices is an edge independently with
/// probability `p_in` inside a block and `p_out` across blocks. Pairs are
/// visited with geometric skips, so the cost is proportional to the number of
/// edges drawn rather than to the number of pairs.
pub fn sample_sbm<R: Rng + ?Sized>(cfg: &SbmConfig, rng: &mut R) -> Result<(Graph, Vec<usize>)> {
    cfg.validate()?;
    let s = cfg.block_size;
    let mut edges = Vec::new();
    for a in 0..cfg.n_blocks {
        // within block a: pairs (v, w) with w < v, enumerated row by row
        if cfg.p_in > 0.0 {
            let base = a * s;
            let (mut v, mut w) = (1u64, 0u64);
            let mut first = true;
            loop {
                let skip = geometric_skip(rng, cfg.p_in);
                w += if first { skip } else { skip + 1 };
                first = false;
                while v < s as u64 && w >= v {
                    w -= v;
                    v += 1;
                }
                if v >= s as u64 {
                    break;
                }
                edges.push((base + v as usize, base + w as usize));
            }
        }
        if cfg.p_out > 0.0 {
            for b in (a + 1)..cfg.n_blocks {
                let total = (s * s) as u64;
                let mut idx = geometric_skip(rng, cfg.p_out);
                while idx < total {
                    let (i, j) = ((idx / s as u64) as usize, (idx % s as u64) as usize);
                    edges.push((a * s + i, b * s + j));
                    idx += 1 + geometric_skip(rng, cfg.p_out);
                }
            }
        }
    }
    let n = cfg.n_vertices();
    let graph = Graph::from_edges(n, edges)?;
    let labels = (0..n).map(|v| v / s).collect();
    Ok((graph, labels))
}

/// Uniform sample without replacement of `size` vertices from `goal_block`.
pub fn sample_hitting_set<R: Rng + ?Sized>(
    block_labels: &[usize],
    goal_block: usize,
    size: usize,
    rng: &mut R,
) -> Result<SeedSet> {
    let members: Vec<usize> = block_labels
        .iter()
        .enumerate()
        .filter_map(|(v, &b)| (b == goal_block).then_some(v))
        .collect();
    if size == 0 || size > members.len() {
        return Err(HitmixError::InvalidArgument(format!(
            "hitting set size {size} must lie in 1..={}",
            members.len()
        )));
    }
    let picked = rand::seq::index::sample(rng, members.len(), size);
    SeedSet::new(picked.into_iter().map(|i| members[i]), block_labels.len())
}

/// Out-of-block edge probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum POut {
    Fixed(f64),
    /// `total / (b - 1)`: keeps the expected number of out-block edges per
    /// vertex constant as the block count varies.
    SplitAcrossBlocks(f64),
}

impl POut {
    pub fn resolve(&self, n_blocks: usize) -> f64 {
        match *self {
            POut::Fixed(p) => p,
            POut::SplitAcrossBlocks(total) if n_blocks > 1 => total / (n_blocks - 1) as f64,
            POut::SplitAcrossBlocks(_) => 0.0,
        }
    }
}

impl FromStr for POut {
    type Err = HitmixError;

    /// Accepts a number or `<total>/(b-1)`.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(total) = compact.strip_suffix("/(b-1)") {
            let total = total
                .parse::<f64>()
                .map_err(|_| HitmixError::InvalidArgument(format!("bad p_out expression {s:?}")))?;
            return Ok(POut::SplitAcrossBlocks(total));
        }
        compact
            .parse::<f64>()
            .map(POut::Fixed)
            .map_err(|_| HitmixError::InvalidArgument(format!("bad p_out value {s:?}")))
    }
}

impl fmt::Display for POut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            POut::Fixed(p) => write!(f, "{p}"),
            POut::SplitAcrossBlocks(t) => write!(f, "{t}/(b-1)"),
        }
    }
}

/// The single parameter varied across conditions.
#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    Blocks(Vec<usize>),
    PIn(Vec<f64>),
    HittingSetSize(Vec<usize>),
}

impl Sweep {
    pub fn len(&self) -> usize {
        match self {
            Sweep::Blocks(v) => v.len(),
            Sweep::PIn(v) => v.len(),
            Sweep::HittingSetSize(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn name(&self) -> &'static str {
        match self {
            Sweep::Blocks(_) => "blocks",
            Sweep::PIn(_) => "p_in",
            Sweep::HittingSetSize(_) => "hitting_set_size",
        }
    }

    pub fn label(&self, i: usize) -> String {
        match self {
            Sweep::Blocks(v) => v[i].to_string(),
            Sweep::PIn(v) => v[i].to_string(),
            Sweep::HittingSetSize(v) => v[i].to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSpec {
    pub sweep: Sweep,
    pub n_blocks: usize,
    pub block_size: usize,
    pub p_in: f64,
    pub p_out: POut,
    pub hitting_set_size: usize,
    pub mc_samples: usize,
    pub seed: u64,
    /// Worker threads; 0 uses the rayon default.
    pub workers: usize,
    pub hitmix: HitmixConfig<f64>,
}

impl SimulationSpec {
    /// Two blocks of 100, `p_in = 0.15`, `p_out = 0.05`, 10 seeds, 500 runs per
    /// condition and `g = 2` fixed.
    pub fn base(sweep: Sweep) -> Self {
        SimulationSpec {
            sweep,
            n_blocks: 2,
            block_size: 100,
            p_in: 0.15,
            p_out: POut::Fixed(0.05),
            hitting_set_size: 10,
            mc_samples: 500,
            seed: 0,
            workers: 0,
            hitmix: HitmixConfig {
                g_candidates: vec![2],
                ..HitmixConfig::default()
            },
        }
    }

    /// Block count 2..=10, blocks of 200, 20 seeds, `p_out = 0.05/(b-1)`.
    pub fn simulation_1() -> Self {
        SimulationSpec {
            block_size: 200,
            hitting_set_size: 20,
            p_out: POut::SplitAcrossBlocks(0.05),
            ..Self::base(Sweep::Blocks((2..=10).collect()))
        }
    }

    /// `p_in` from 0.05 to 0.20 in steps of 0.01.
    pub fn simulation_2() -> Self {
        let values = (5..=20).map(|k| k as f64 / 100.0).collect();
        Self::base(Sweep::PIn(values))
    }

    /// Hitting-set sizes 1, 5, 10, 25, 50.
    pub fn simulation_3() -> Self {
        Self::base(Sweep::HittingSetSize(vec![1, 5, 10, 25, 50]))
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweep.is_empty() {
            return Err(HitmixError::InvalidArgument("sweep has no values".into()));
        }
        if self.mc_samples == 0 {
            return Err(HitmixError::InvalidArgument(
                "mc_samples must be at least 1".into(),
            ));
        }
        self.hitmix.validate()?;
        for i in 0..self.sweep.len() {
            let (cfg, size) = self.condition(i, 0);
            cfg.validate()?;
            if size == 0 || size > cfg.block_size {
                return Err(HitmixError::InvalidArgument(format!(
                    "hitting set size {size} must lie in 1..={}",
                    cfg.block_size
                )));
            }
        }
        Ok(())
    }

    /// Block model and hitting-set size of condition `i`.
    pub fn condition(&self, i: usize, rng_seed: u64) -> (SbmConfig, usize) {
        let mut n_blocks = self.n_blocks;
        let mut p_in = self.p_in;
        let mut size = self.hitting_set_size;
        match &self.sweep {
            Sweep::Blocks(v) => n_blocks = v[i],
            Sweep::PIn(v) => p_in = v[i],
            Sweep::HittingSetSize(v) => size = v[i],
        }
        let cfg = SbmConfig {
            n_blocks,
            block_size: self.block_size,
            p_in,
            p_out: self.p_out.resolve(n_blocks),
            rng_seed,
        };
        (cfg, size)
    }
}

/// Generator for run `run` of condition `condition`, keyed on all three
/// indices so any run can be replayed alone.
pub fn run_rng(master_seed: u64, condition: usize, run: usize) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&(condition as u64).to_le_bytes());
    key[16..24].copy_from_slice(&(run as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Outcome of one Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub condition: usize,
    pub run: usize,
    /// `None` when the run failed.
    pub ari: Option<f64>,
    pub f1: Option<f64>,
    pub unreachable: usize,
    pub error: Option<String>,
    /// Largest log-likelihood decrease over every EM fit of the run.
    pub em_max_ll_drop: f64,
    /// Largest responsibility row-sum error over every EM iteration.
    pub em_max_row_sum_error: f64,
}

/// Scores one sampled instance: ARI of (goal set, rest) against (goal block,
/// rest) over the non-seed vertices, and F1 of the goal set against the
/// non-seed goal-block vertices.
pub fn run_once(spec: &SimulationSpec, condition: usize, run: usize) -> RunRecord {
    let mut rng = run_rng(spec.seed, condition, run);
    let mut record = RunRecord {
        condition,
        run,
        ari: None,
        f1: None,
        unreachable: 0,
        error: None,
        em_max_ll_drop: 0.0,
        em_max_row_sum_error: 0.0,
    };
    let outcome = (|| -> Result<()> {
        let (cfg, size) = spec.condition(condition, rng.next_u64());
        let (graph, labels) = sample_sbm(&cfg, &mut rng)?;
        let seeds = sample_hitting_set(&labels, 0, size, &mut rng)?;
        let hm = HitmixConfig {
            rng_seed: rng.next_u64(),
            ..spec.hitmix.clone()
        };
        let result = hitmix(&graph, &seeds, &hm)?;
        record.unreachable = result.unreachable_count();
        record.em_max_ll_drop = result
            .fits
            .iter()
            .map(|f| f.max_log_likelihood_drop)
            .fold(0.0, f64::max);
        record.em_max_row_sum_error = result
            .fits
            .iter()
            .map(|f| f.max_row_sum_error)
            .fold(0.0, f64::max);

        let predicted: LabelVector = result.rows.iter().map(|r| r.in_goal).collect();
        let truth: LabelVector = result.rows.iter().map(|r| labels[r.vertex] == 0).collect();
        record.ari = Some(adjusted_rand_index(&predicted, &truth)?);
        let truth_set = result
            .rows
            .iter()
            .filter(|r| labels[r.vertex] == 0)
            .map(|r| r.vertex);
        record.f1 = Some(precision_recall_f1(result.goal_set(), truth_set, graph.n_vertices()).f1);
        Ok(())
    })();
    if let Err(e) = outcome {
        record.error = Some(e.to_string());
    }
    record
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionSummary {
    pub condition: String,
    pub ari_mean: f64,
    pub ari_p5: f64,
    pub ari_p95: f64,
    pub f1_mean: f64,
    pub f1_p5: f64,
    pub f1_p95: f64,
    pub failures: usize,
    pub disconnected_runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSummary {
    pub sweep: String,
    pub conditions: Vec<ConditionSummary>,
    pub runs: Vec<RunRecord>,
}

fn summarize(label: String, runs: &[RunRecord]) -> ConditionSummary {
    let ari: Vec<f64> = runs.iter().filter_map(|r| r.ari).collect();
    let f1: Vec<f64> = runs.iter().filter_map(|r| r.f1).collect();
    let stats = |v: &[f64]| -> (f64, f64, f64) {
        if v.is_empty() {
            return (f64::NAN, f64::NAN, f64::NAN);
        }
        let mut sorted = v.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
        let q = percentiles(&sorted, &[0.05, 0.95]).expect("non-empty");
        (mean, q[0], q[1])
    };
    let (ari_mean, ari_p5, ari_p95) = stats(&ari);
    let (f1_mean, f1_p5, f1_p95) = stats(&f1);
    ConditionSummary {
        condition: label,
        ari_mean,
        ari_p5,
        ari_p95,
        f1_mean,
        f1_p5,
        f1_p95,
        failures: runs.iter().filter(|r| r.error.is_some()).count(),
        disconnected_runs: runs.iter().filter(|r| r.unreachable > 0).count(),
    }
}

/// Runs every condition of the sweep `mc_samples` times and aggregates the
/// scores. Failed runs are recorded, not fatal.
pub fn run_simulation(spec: &SimulationSpec) -> Result<McSummary> {
    spec.validate()?;
    let jobs: Vec<(usize, usize)> = (0..spec.sweep.len())
        .flat_map(|c| (0..spec.mc_samples).map(move |r| (c, r)))
        .collect();
    let execute = || -> Vec<RunRecord> {
        jobs.par_iter()
            .map(|&(c, r)| run_once(spec, c, r))
            .collect()
    };
    let runs = if spec.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(spec.workers)
            .build()
            .map_err(|e| HitmixError::InvalidArgument(format!("thread pool: {e}")))?
            .install(execute)
    } else {
        execute()
    };
    for r in runs.iter().filter(|r| r.error.is_some()) {
        log::warn!(
            "condition {} run {} failed: {}",
            r.condition,
            r.run,
            r.error.as_deref().unwrap_or_default()
        );
    }
    let conditions = (0..spec.sweep.len())
        .map(|c| {
            let slice = &runs[c * spec.mc_samples..(c + 1) * spec.mc_samples];
            summarize(spec.sweep.label(c), slice)
        })
        .collect();
    Ok(McSummary {
        sweep: spec.sweep.name().to_owned(),
        conditions,
        runs,
    })
}

impl McSummary {
    /// `condition,run,ari,f1`; failed runs leave the scores empty.
    pub fn runs_csv(&self) -> String {
        let mut out = String::from("condition,run,ari,f1\n");
        for r in &self.runs {
            let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.conditions[r.condition].condition,
                r.run,
                fmt(r.ari),
                fmt(r.f1)
            ));
        }
        out
    }

    /// `condition,ari_mean,ari_p5,ari_p95,f1_mean,f1_p5,f1_p95`.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("condition,ari_mean,ari_p5,ari_p95,f1_mean,f1_p5,f1_p95\n");
        for c in &self.conditions {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                c.condition, c.ari_mean, c.ari_p5, c.ari_p95, c.f1_mean, c.f1_p5, c.f1_p95
            ));
        }
        out
    }
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| HitmixError::InvalidArgument(format!("bad value {s:?} for {key}")))
        })
        .collect()
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| HitmixError::InvalidArgument(format!("bad value {value:?} for {key}")))
}

impl SimulationSpec {
    /// Parses `key = value` lines (`#` comments). Keys: `sweep`
    /// (`blocks`, `p_in`, `hitting_set_size`), `values`, `n_blocks`,
    /// `block_size`, `p_in`, `p_out` (number or `<total>/(b-1)`),
    /// `hitting_set_size`, `mc_samples`, `seed`, `workers`, `clusters`,
    /// `samples_per_vertex`, `tau`.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut sweep_name: Option<String> = None;
        let mut values: Option<String> = None;
        let mut spec = SimulationSpec::base(Sweep::PIn(Vec::new()));
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| HitmixError::Parse {
                line: i + 1,
                message: format!("expected key = value, found {line:?}"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "sweep" => sweep_name = Some(value.to_owned()),
                "values" => values = Some(value.to_owned()),
                "n_blocks" => spec.n_blocks = parse_value(key, value)?,
                "block_size" => spec.block_size = parse_value(key, value)?,
                "p_in" => spec.p_in = parse_value(key, value)?,
                "p_out" => spec.p_out = value.parse()?,
                "hitting_set_size" => spec.hitting_set_size = parse_value(key, value)?,
                "mc_samples" => spec.mc_samples = parse_value(key, value)?,
                "seed" => spec.seed = parse_value(key, value)?,
                "workers" => spec.workers = parse_value(key, value)?,
                "samples_per_vertex" => spec.hitmix.m = parse_value(key, value)?,
                "tau" => spec.hitmix.tau = parse_value(key, value)?,
                "clusters" => {
                    spec.hitmix.g_candidates = if value == "auto" {
                        vec![2, 3, 4, 5]
                    } else {
                        parse_list(key, value)?
                    }
                }
                _ => {
                    return Err(HitmixError::Parse {
                        line: i + 1,
                        message: format!("unknown key {key:?}"),
                    })
                }
            }
        }
        let name = sweep_name
            .ok_or_else(|| HitmixError::InvalidArgument("config lacks a sweep key".into()))?;
        let values = values
            .ok_or_else(|| HitmixError::InvalidArgument("config lacks a values key".into()))?;
        spec.sweep = match name.as_str() {
            "blocks" | "n_blocks" => Sweep::Blocks(parse_list("values", &values)?),
            "p_in" => Sweep::PIn(parse_list("values", &values)?),
            "hitting_set_size" => Sweep::HittingSetSize(parse_list("values", &values)?),
            other => {
                return Err(HitmixError::InvalidArgument(format!(
                    "unknown sweep {other:?}"
                )))
            }
        };
        Ok(spec)
    }
}
