//! Lognormal mixture over per-vertex hitting-time distributions.
//!
//! Each reachable non-seed vertex contributes `m` pseudo-samples drawn from
//! the lognormal fitted to its hitting-time mean and variance. A vertex is a
//! single unit of the mixture: all of its samples share one latent component,
//! so the responsibility of component `k` for vertex `i` is
//!
//! ```text
//! r_ik ∝ π_k Π_j f(t_ij; μ_k, σ²_k)
//! ```
//!
//! The component with the smallest fitted mean `exp(μ + σ²/2)` is the goal
//! component; a vertex's responsibility under it is its membership
//! probability.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HitmixError, Result};
use crate::graph::{Graph, SeedSet};
use crate::moments::{compute_moments, MomentTable};
use crate::scalar::Scalar;
use crate::solver::{CgConfig, CgStats};

/// Weight below which a component is considered collapsed.
const COLLAPSE_WEIGHT: f64 = 1e-12;
const MAX_RESTARTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LognormalParams<T> {
    /// Location of `log t`.
    pub mu: T,
    /// Variance of `log t`.
    pub sigma2: T,
}

impl<T: Scalar> LognormalParams<T> {
    pub fn mean(&self) -> T {
        (self.mu + self.sigma2 / T::lit(2.0)).exp()
    }

    pub fn variance(&self) -> T {
        self.sigma2.exp_m1() * (T::lit(2.0) * self.mu + self.sigma2).exp()
    }

    pub fn ln_pdf(&self, t: T) -> T {
        let y = t.ln();
        let two = T::lit(2.0);
        -y - (two * T::lit(std::f64::consts::PI) * self.sigma2).ln() / two
            - (y - self.mu).powi(2) / (two * self.sigma2)
    }
}

/// Method-of-moments lognormal from a mean and a variance. The log-variance
/// is floored at `sigma2_floor`, which covers deterministic hitting times.
pub fn lognormal_mom<T: Scalar>(
    mean: T,
    variance: T,
    sigma2_floor: T,
) -> Result<LognormalParams<T>> {
    if !(mean.is_finite() && mean > T::zero()) {
        return Err(HitmixError::InvalidArgument(format!(
            "lognormal mean must be positive and finite, got {mean}"
        )));
    }
    if variance.is_nan() || variance.is_infinite() {
        return Err(HitmixError::InvalidArgument(format!(
            "lognormal variance must be finite, got {variance}"
        )));
    }
    let ratio = variance.max(T::zero()) / (mean * mean);
    let sigma2 = ratio.ln_1p().max(sigma2_floor);
    Ok(LognormalParams {
        mu: mean.ln() - sigma2 / T::lit(2.0),
        sigma2,
    })
}

/// `m` pseudo-samples for each reachable non-seed vertex, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexSamples<T> {
    pub vertices: Vec<usize>,
    pub per_vertex: usize,
    pub values: Vec<T>,
    pub rng_seed: u64,
}

impl<T: Scalar> VertexSamples<T> {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn samples(&self, i: usize) -> &[T] {
        &self.values[i * self.per_vertex..(i + 1) * self.per_vertex]
    }

    /// Builds samples directly, e.g. from synthetic data.
    pub fn from_rows(vertices: Vec<usize>, rows: Vec<Vec<T>>, rng_seed: u64) -> Result<Self> {
        let per_vertex = rows.first().map_or(0, Vec::len);
        if per_vertex == 0 || rows.len() != vertices.len() {
            return Err(HitmixError::InvalidArgument(
                "need one non-empty sample row per vertex".into(),
            ));
        }
        if rows.iter().any(|r| r.len() != per_vertex) {
            return Err(HitmixError::InvalidArgument(
                "every vertex needs the same number of samples".into(),
            ));
        }
        let values: Vec<T> = rows.into_iter().flatten().collect();
        if values.iter().any(|&t| !(t.is_finite() && t > T::zero())) {
            return Err(HitmixError::InvalidArgument(
                "samples must be positive and finite".into(),
            ));
        }
        Ok(VertexSamples {
            vertices,
            per_vertex,
            values,
            rng_seed,
        })
    }
}

/// Independent stream per vertex so draws do not depend on iteration order.
fn vertex_rng(rng_seed: u64, vertex: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(vertex as u64);
    rng
}

/// Draws `m` lognormal pseudo-samples per reachable vertex of `moments`.
pub fn draw_pseudo_samples<T: Scalar>(
    moments: &MomentTable<T>,
    m: usize,
    rng_seed: u64,
    sigma2_floor: T,
) -> Result<VertexSamples<T>> {
    if m == 0 {
        return Err(HitmixError::InvalidArgument(
            "samples per vertex must be at least 1".into(),
        ));
    }
    let rows: Vec<_> = moments.reachable_rows().collect();
    let params = rows
        .iter()
        .map(|r| {
            let mean = r.mean().expect("reachable rows carry moments");
            let var = r.variance().ok_or_else(|| {
                HitmixError::InvalidArgument("moment table lacks second moments".into())
            })?;
            lognormal_mom(mean, var, sigma2_floor)
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<T> = rows
        .par_iter()
        .zip(params.par_iter())
        .flat_map_iter(|(row, p)| {
            let mut rng = vertex_rng(rng_seed, row.vertex);
            let sd = p.sigma2.sqrt();
            (0..m)
                .map(|_| (p.mu + sd * T::standard_normal(&mut rng)).exp())
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(VertexSamples {
        vertices: rows.iter().map(|r| r.vertex).collect(),
        per_vertex: m,
        values,
        rng_seed,
    })
}

/// How the BIC penalty counts observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BicSampleSize {
    /// `N = n_vertices * m`.
    Observations,
    /// `N = n_vertices`.
    Vertices,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HitmixConfig<T> {
    /// Pseudo-samples per vertex.
    pub m: usize,
    pub g_candidates: Vec<usize>,
    pub tau: T,
    pub em_max_iters: usize,
    pub em_rel_tol: T,
    pub rng_seed: u64,
    pub sigma2_floor: T,
    pub bic_n: BicSampleSize,
    pub cg: CgConfig<T>,
}

impl<T: Scalar> Default for HitmixConfig<T> {
    fn default() -> Self {
        HitmixConfig {
            m: 25,
            g_candidates: vec![2, 3, 4, 5],
            tau: T::lit(0.5),
            em_max_iters: 500,
            em_rel_tol: T::lit(1e-8),
            rng_seed: 0,
            sigma2_floor: T::lit(1e-8),
            bic_n: BicSampleSize::Observations,
            cg: CgConfig::default(),
        }
    }
}

impl<T: Scalar> HitmixConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HitmixError::InvalidArgument(msg));
        if self.m == 0 {
            return bad("samples per vertex must be at least 1".into());
        }
        if self.g_candidates.is_empty() || self.g_candidates.iter().any(|&g| g < 2) {
            return bad(format!(
                "cluster counts must be non-empty and at least 2, got {:?}",
                self.g_candidates
            ));
        }
        if !(self.tau >= T::zero() && self.tau <= T::one()) {
            return bad(format!("tau must lie in [0, 1], got {}", self.tau));
        }
        if self.em_max_iters == 0 {
            return bad("em_max_iters must be at least 1".into());
        }
        if self.em_rel_tol.is_nan() || self.em_rel_tol <= T::zero() {
            return bad(format!(
                "em_rel_tol must be positive, got {}",
                self.em_rel_tol
            ));
        }
        if self.sigma2_floor.is_nan() || self.sigma2_floor <= T::zero() {
            return bad(format!(
                "sigma2_floor must be positive, got {}",
                self.sigma2_floor
            ));
        }
        self.cg.validate()
    }
}

/// State of a fitted `g`-component lognormal mixture.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureFit<T> {
    pub g: usize,
    pub components: Vec<LognormalParams<T>>,
    pub weights: Vec<T>,
    /// Row-major `n_vertices x g`.
    pub responsibilities: Vec<T>,
    pub log_likelihood: T,
    /// Log-likelihood after every E-step since the last restart.
    pub log_likelihood_trace: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
    pub restarts: usize,
    /// Largest `|Σ_k r_ik - 1|` seen over all E-steps.
    pub max_row_sum_error: T,
    pub n_vertices: usize,
    pub per_vertex: usize,
}

impl<T: Scalar> MixtureFit<T> {
    pub fn responsibility(&self, vertex: usize, component: usize) -> T {
        self.responsibilities[vertex * self.g + component]
    }

    /// Component with the smallest fitted mean; ties go to the lower index.
    pub fn goal_component(&self) -> usize {
        let mut best = 0;
        for k in 1..self.g {
            if self.components[k].mean() < self.components[best].mean() {
                best = k;
            }
        }
        best
    }

    /// Posterior probability of the goal component for each vertex.
    pub fn goal_posteriors(&self) -> Vec<T> {
        let goal = self.goal_component();
        (0..self.n_vertices)
            .map(|i| self.responsibility(i, goal))
            .collect()
    }

    /// Largest decrease between consecutive trace entries (zero if monotone).
    pub fn max_log_likelihood_drop(&self) -> T {
        self.log_likelihood_trace
            .windows(2)
            .map(|w| (w[0] - w[1]).max(T::zero()))
            .fold(T::zero(), T::max)
    }

    /// Reorders components; responsibilities and weights follow.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let mut out = self.clone();
        out.components = order.iter().map(|&k| self.components[k]).collect();
        out.weights = order.iter().map(|&k| self.weights[k]).collect();
        for i in 0..self.n_vertices {
            for (new_k, &old_k) in order.iter().enumerate() {
                out.responsibilities[i * self.g + new_k] = self.responsibility(i, old_k);
            }
        }
        out
    }
}

/// Per-vertex sufficient statistics of the log-samples.
struct LogStats<T> {
    /// Mean of `log t_ij` over `j`.
    mean: Vec<T>,
    /// `Σ_j (log t_ij - mean_i)²`.
    within: Vec<T>,
    per_vertex: T,
}

impl<T: Scalar> LogStats<T> {
    fn new(samples: &VertexSamples<T>) -> Self {
        let m = T::from_count(samples.per_vertex);
        let mut mean = Vec::with_capacity(samples.len());
        let mut within = Vec::with_capacity(samples.len());
        for i in 0..samples.len() {
            let logs: Vec<T> = samples.samples(i).iter().map(|t| t.ln()).collect();
            let mu = logs.iter().copied().sum::<T>() / m;
            mean.push(mu);
            within.push(logs.iter().map(|&y| (y - mu) * (y - mu)).sum());
        }
        LogStats {
            mean,
            within,
            per_vertex: m,
        }
    }

    fn len(&self) -> usize {
        self.mean.len()
    }

    /// `Σ_j log f(t_ij; θ)` for vertex `i`.
    fn ln_density(&self, i: usize, theta: &LognormalParams<T>) -> T {
        let two = T::lit(2.0);
        let m = self.per_vertex;
        let dev = self.mean[i] - theta.mu;
        -m * self.mean[i]
            - m * (two * T::lit(std::f64::consts::PI) * theta.sigma2).ln() / two
            - (self.within[i] + m * dev * dev) / (two * theta.sigma2)
    }

    /// Weighted MLE of `(μ, σ²)` over the log-samples; `None` if the total
    /// weight vanishes.
    fn weighted_mle(&self, weight: impl Fn(usize) -> T, floor: T) -> Option<LognormalParams<T>> {
        let total: T = (0..self.len()).map(&weight).sum();
        if total.is_nan() || total <= T::zero() {
            return None;
        }
        let mu = (0..self.len()).map(|i| weight(i) * self.mean[i]).sum::<T>() / total;
        let ss = (0..self.len())
            .map(|i| {
                let dev = self.mean[i] - mu;
                weight(i) * (self.within[i] + self.per_vertex * dev * dev)
            })
            .sum::<T>();
        Some(LognormalParams {
            mu,
            sigma2: (ss / (total * self.per_vertex)).max(floor),
        })
    }
}

struct EStep<T> {
    log_likelihood: T,
    max_row_sum_error: T,
}

fn e_step<T: Scalar>(
    stats: &LogStats<T>,
    components: &[LognormalParams<T>],
    weights: &[T],
    resp: &mut [T],
) -> EStep<T> {
    let g = components.len();
    let ln_weights: Vec<T> = weights.iter().map(|w| w.ln()).collect();
    let mut log_likelihood = T::zero();
    let mut max_row_sum_error = T::zero();
    let mut row = vec![T::zero(); g];
    for i in 0..stats.len() {
        for k in 0..g {
            row[k] = ln_weights[k] + stats.ln_density(i, &components[k]);
        }
        let max = row.iter().copied().fold(T::neg_infinity(), T::max);
        let mut sum = T::zero();
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum = sum + *v;
        }
        log_likelihood = log_likelihood + max + sum.ln();
        let out = &mut resp[i * g..(i + 1) * g];
        let mut check = T::zero();
        for (r, &v) in out.iter_mut().zip(&row) {
            *r = v / sum;
            check = check + *r;
        }
        max_row_sum_error = max_row_sum_error.max((check - T::one()).abs());
    }
    EStep {
        log_likelihood,
        max_row_sum_error,
    }
}

/// Fits a `g`-component lognormal mixture by EM.
///
/// Components start from an equal-size split of the vertices ordered by the
/// mean of their log-samples. Iteration stops when the relative change of the
/// log-likelihood falls below `em_rel_tol` or after `em_max_iters` M-steps.
/// A component whose weight drops below `1e-12` is restarted at the pooled
/// estimate, at most three times.
pub fn em_fit<T: Scalar>(
    samples: &VertexSamples<T>,
    g: usize,
    cfg: &HitmixConfig<T>,
) -> Result<MixtureFit<T>> {
    if g < 2 {
        return Err(HitmixError::InvalidArgument(format!(
            "mixture needs at least 2 components, got {g}"
        )));
    }
    let n = samples.len();
    if g > n {
        return Err(HitmixError::InvalidArgument(format!(
            "{g} components requested for {n} vertices"
        )));
    }
    let stats = LogStats::new(samples);
    let floor = cfg.sigma2_floor;
    let pooled = stats
        .weighted_mle(|_| T::one(), floor)
        .expect("non-empty sample set");

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        stats.mean[a]
            .partial_cmp(&stats.mean[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut group = vec![0usize; n];
    for k in 0..g {
        for &i in &order[k * n / g..(k + 1) * n / g] {
            group[i] = k;
        }
    }
    let mut components: Vec<LognormalParams<T>> = (0..g)
        .map(|k| {
            stats
                .weighted_mle(|i| if group[i] == k { T::one() } else { T::zero() }, floor)
                .unwrap_or(pooled)
        })
        .collect();
    let mut weights = vec![T::one() / T::from_count(g); g];
    let mut resp = vec![T::zero(); n * g];

    let first = e_step(&stats, &components, &weights, &mut resp);
    let mut ll = first.log_likelihood;
    let mut max_row_sum_error = first.max_row_sum_error;
    let mut trace = vec![ll];
    let mut iterations = 0;
    let mut restarts = 0;
    let mut converged = false;

    while iterations < cfg.em_max_iters {
        iterations += 1;
        let mut collapsed = None;
        for k in 0..g {
            let w: T = (0..n).map(|i| resp[i * g + k]).sum::<T>() / T::from_count(n);
            weights[k] = w;
            if w < T::lit(COLLAPSE_WEIGHT) {
                collapsed = Some(k);
                continue;
            }
            if let Some(theta) = stats.weighted_mle(|i| resp[i * g + k], floor) {
                components[k] = theta;
            }
        }
        if let Some(k) = collapsed {
            if restarts == MAX_RESTARTS {
                return Err(HitmixError::ComponentCollapse {
                    component: k,
                    restarts,
                });
            }
            restarts += 1;
            log::warn!("mixture component {k} of {g} collapsed; restarting at pooled estimate");
            for (kk, w) in weights.iter_mut().enumerate() {
                if *w < T::lit(COLLAPSE_WEIGHT) {
                    components[kk] = pooled;
                    *w = T::one() / T::from_count(g);
                }
            }
            let total: T = weights.iter().copied().sum();
            weights.iter_mut().for_each(|w| *w = *w / total);
            let step = e_step(&stats, &components, &weights, &mut resp);
            ll = step.log_likelihood;
            max_row_sum_error = max_row_sum_error.max(step.max_row_sum_error);
            trace.clear();
            trace.push(ll);
            continue;
        }

        let step = e_step(&stats, &components, &weights, &mut resp);
        max_row_sum_error = max_row_sum_error.max(step.max_row_sum_error);
        let change = (step.log_likelihood - ll).abs();
        let scale = ll.abs().max(T::min_positive_value());
        ll = step.log_likelihood;
        trace.push(ll);
        if change <= cfg.em_rel_tol * scale {
            converged = true;
            break;
        }
    }

    Ok(MixtureFit {
        g,
        components,
        weights,
        responsibilities: resp,
        log_likelihood: ll,
        log_likelihood_trace: trace,
        iterations,
        converged,
        restarts,
        max_row_sum_error,
        n_vertices: n,
        per_vertex: samples.per_vertex,
    })
}

/// `BIC = (3g - 1) ln N - 2 log L`; lower is better.
pub fn bic<T: Scalar>(fit: &MixtureFit<T>, n_vertices: usize, m: usize, basis: BicSampleSize) -> T {
    let params = T::from_count(3 * fit.g - 1);
    let n = match basis {
        BicSampleSize::Observations => n_vertices * m,
        BicSampleSize::Vertices => n_vertices,
    };
    params * T::from_count(n).ln() - T::lit(2.0) * fit.log_likelihood
}

/// Summary of one candidate fit, for reporting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitSummary<T> {
    pub g: usize,
    pub bic: T,
    pub log_likelihood: T,
    pub iterations: usize,
    pub converged: bool,
    pub restarts: usize,
    pub weights: Vec<T>,
    pub components: Vec<LognormalParams<T>>,
    pub max_log_likelihood_drop: T,
    pub max_row_sum_error: T,
}

/// Membership outcome for one non-seed vertex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipRow<T> {
    pub vertex: usize,
    pub reachable: bool,
    pub mean: Option<T>,
    pub variance: Option<T>,
    pub posterior: T,
    pub in_goal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipResult<T> {
    /// One row per non-seed vertex, ascending.
    pub rows: Vec<MembershipRow<T>>,
    pub tau: T,
    pub selected_g: usize,
    pub goal_component: usize,
    /// Every candidate fit, in `g_candidates` order.
    pub fits: Vec<FitSummary<T>>,
    pub selected: MixtureFit<T>,
    pub cg_stats: Vec<CgStats<T>>,
    pub rng_seed: u64,
}

impl<T: Scalar> MembershipResult<T> {
    /// The goal set `Ψ`.
    pub fn goal_set(&self) -> Vec<usize> {
        self.rows
            .iter()
            .filter(|r| r.in_goal)
            .map(|r| r.vertex)
            .collect()
    }

    pub fn unreachable_count(&self) -> usize {
        self.rows.iter().filter(|r| !r.reachable).count()
    }

    pub fn bic_values(&self) -> Vec<(usize, T)> {
        self.fits.iter().map(|f| (f.g, f.bic)).collect()
    }
}

/// Fits every candidate `g` and returns `(summaries, selected fit)` with the
/// minimum-BIC fit selected (first on ties).
pub fn select_mixture<T: Scalar>(
    samples: &VertexSamples<T>,
    cfg: &HitmixConfig<T>,
) -> Result<(Vec<FitSummary<T>>, MixtureFit<T>)> {
    let candidates: Vec<usize> = cfg
        .g_candidates
        .iter()
        .copied()
        .filter(|&g| g <= samples.len())
        .collect();
    if candidates.is_empty() {
        return Err(HitmixError::InvalidArgument(format!(
            "only {} reachable non-seed vertices; too few for any of {:?} components",
            samples.len(),
            cfg.g_candidates
        )));
    }
    let attempts: Vec<Result<MixtureFit<T>>> = candidates
        .par_iter()
        .map(|&g| em_fit(samples, g, cfg))
        .collect();
    // A candidate that keeps collapsing has more components than the data
    // supports; drop it and let BIC choose among the rest.
    let mut fits = Vec::with_capacity(attempts.len());
    let mut last_collapse = None;
    for (g, attempt) in candidates.iter().zip(attempts) {
        match attempt {
            Ok(fit) => fits.push(fit),
            Err(e @ HitmixError::ComponentCollapse { .. }) => {
                log::warn!("g = {g} skipped: {e}");
                last_collapse = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    if fits.is_empty() {
        return Err(last_collapse.expect("at least one candidate was attempted"));
    }
    let summaries: Vec<FitSummary<T>> = fits
        .iter()
        .map(|f| FitSummary {
            g: f.g,
            bic: bic(f, samples.len(), samples.per_vertex, cfg.bic_n),
            log_likelihood: f.log_likelihood,
            iterations: f.iterations,
            converged: f.converged,
            restarts: f.restarts,
            weights: f.weights.clone(),
            components: f.components.clone(),
            max_log_likelihood_drop: f.max_log_likelihood_drop(),
            max_row_sum_error: f.max_row_sum_error,
        })
        .collect();
    let mut best = 0;
    for (i, s) in summaries.iter().enumerate() {
        log::info!(
            "g = {}: bic {:.6}, {} em iterations, converged {}",
            s.g,
            s.bic,
            s.iterations,
            s.converged
        );
        if s.bic < summaries[best].bic {
            best = i;
        }
    }
    let selected = fits.into_iter().nth(best).expect("index in range");
    Ok((summaries, selected))
}

/// The full pipeline: moments, pseudo-samples, mixture fits with BIC
/// selection, and thresholding of the goal posterior at `tau`.
/// Unreachable vertices get posterior zero.
pub fn hitmix<T: Scalar>(
    graph: &Graph,
    seeds: &SeedSet,
    cfg: &HitmixConfig<T>,
) -> Result<MembershipResult<T>> {
    cfg.validate()?;
    let moments = compute_moments(graph, seeds, 2, &cfg.cg)?;
    for (m, s) in moments.cg_stats.iter().enumerate() {
        log::info!(
            "moment {}: {} cg iterations, relative residual {:e}",
            m + 1,
            s.iterations,
            s.final_rel_residual
        );
    }
    let samples = draw_pseudo_samples(&moments, cfg.m, cfg.rng_seed, cfg.sigma2_floor)?;
    let (fits, selected) = select_mixture(&samples, cfg)?;
    let goal = selected.goal_component();
    let posteriors = selected.goal_posteriors();

    let mut next = 0;
    let rows = moments
        .rows
        .iter()
        .map(|r| {
            let posterior = if r.reachable {
                let p = posteriors[next];
                debug_assert_eq!(samples.vertices[next], r.vertex);
                next += 1;
                p
            } else {
                T::zero()
            };
            MembershipRow {
                vertex: r.vertex,
                reachable: r.reachable,
                mean: r.mean(),
                variance: r.variance(),
                posterior,
                in_goal: posterior > cfg.tau,
            }
        })
        .collect();
    Ok(MembershipResult {
        rows,
        tau: cfg.tau,
        selected_g: selected.g,
        goal_component: goal,
        fits,
        selected,
        cg_stats: moments.cg_stats,
        rng_seed: cfg.rng_seed,
    })
}
