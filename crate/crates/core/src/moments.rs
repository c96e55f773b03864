//! Hitting-time moments to a seed set.
//!
//! With `P = D^{-1} A` restricted to the non-seed vertices, the raw moments
//! satisfy
//!
//! ```text
//! (I - P) E[T^m] = 1 + Σ_{s=1}^{m-1} C(m, s) P E[T^s]
//! ```
//!
//! Scaling both sides by `D^{1/2}` turns the coefficient matrix into the
//! symmetric `I - D^{-1/2} A D^{-1/2}`, which is solved by conjugate gradient
//! one moment order at a time.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{HitmixError, Result};
use crate::graph::{build_nonseed_index, reachable_from, Graph, NonSeedIndex, SeedSet};
use crate::scalar::Scalar;
use crate::solver::{conjugate_gradient, CgConfig, CgStats, RestrictedOperator};

/// Moments of one non-seed vertex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexMoments<T> {
    pub vertex: usize,
    pub reachable: bool,
    /// `E[T^1], E[T^2], ...`; empty when the vertex cannot reach the seeds.
    pub raw: Vec<T>,
}

impl<T: Scalar> VertexMoments<T> {
    pub fn mean(&self) -> Option<T> {
        self.raw.first().copied()
    }

    /// `E[T^2] - E[T]^2`, clamped at zero.
    pub fn variance(&self) -> Option<T> {
        match self.raw.as_slice() {
            [m1, m2, ..] => Some((*m2 - *m1 * *m1).max(T::zero())),
            _ => None,
        }
    }
}

/// Per-vertex hitting-time moments for every vertex outside the seed set,
/// in ascending vertex order.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable<T> {
    pub rows: Vec<VertexMoments<T>>,
    pub order: usize,
    /// One entry per moment order.
    pub cg_stats: Vec<CgStats<T>>,
}

impl<T: Scalar> MomentTable<T> {
    pub fn unreachable_count(&self) -> usize {
        self.rows.iter().filter(|r| !r.reachable).count()
    }

    pub fn reachable_rows(&self) -> impl Iterator<Item = &VertexMoments<T>> {
        self.rows.iter().filter(|r| r.reachable)
    }

    pub fn get(&self, vertex: usize) -> Option<&VertexMoments<T>> {
        self.rows
            .binary_search_by_key(&vertex, |r| r.vertex)
            .ok()
            .map(|i| &self.rows[i])
    }
}

fn binomial<T: Scalar>(n: usize, k: usize) -> T {
    let k = k.min(n - k);
    let mut c = 1f64;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    T::lit(c.round())
}

/// Right-hand side of the order-`m` system in the original coordinates:
/// `1 + Σ_{s<m} C(m, s) (P E[T^s])_i` over the vertices of `index`.
pub fn moment_rhs<T: Scalar>(
    m: usize,
    lower_moments: &[Vec<T>],
    graph: &Graph,
    index: &NonSeedIndex,
) -> Result<Vec<T>> {
    if m < 1 {
        return Err(HitmixError::InvalidArgument(
            "moment order must be at least 1".into(),
        ));
    }
    if lower_moments.len() != m - 1 {
        return Err(HitmixError::InvalidArgument(format!(
            "order-{m} right-hand side needs {} lower moments, got {}",
            m - 1,
            lower_moments.len()
        )));
    }
    for v in lower_moments {
        if v.len() != index.len() {
            return Err(HitmixError::DimensionMismatch {
                expected: index.len(),
                actual: v.len(),
            });
        }
    }
    if m == 1 {
        return Ok(vec![T::one(); index.len()]);
    }
    // Combine the lower moments first so P is applied once.
    let coeffs: Vec<T> = (1..m).map(|s| binomial(m, s)).collect();
    let combined: Vec<T> = (0..index.len())
        .map(|j| {
            coeffs
                .iter()
                .zip(lower_moments)
                .fold(T::zero(), |acc, (&c, v)| acc + c * v[j])
        })
        .collect();
    let rhs = index
        .vertices()
        .iter()
        .map(|&v| {
            let d = T::from_u64(graph.degree(v)).expect("degree representable");
            let s = graph
                .adjacency_row(v)
                .filter_map(|(u, w)| index.local(u).map(|j| (j, w)))
                .fold(T::zero(), |acc, (j, w)| {
                    acc + T::from_u64(w).expect("weight representable") * combined[j]
                });
            T::one() + s / d
        })
        .collect();
    Ok(rhs)
}

/// Hitting-time raw moments up to `order` (at least 2) for all non-seed
/// vertices. Vertices without a path to the seed set are flagged and left
/// out of the solves.
pub fn compute_moments<T: Scalar>(
    graph: &Graph,
    seeds: &SeedSet,
    order: usize,
    cfg: &CgConfig<T>,
) -> Result<MomentTable<T>> {
    if order < 2 {
        return Err(HitmixError::InvalidArgument(
            "moment order must be at least 2 to obtain variances".into(),
        ));
    }
    cfg.validate()?;
    let full = build_nonseed_index(graph, seeds)?;
    let reach = reachable_from(graph, seeds);
    let active = full.restrict(&reach.reachable)?;
    if active.is_empty() {
        return Err(HitmixError::AllUnreachable);
    }
    if reach.unreachable_count > 0 {
        log::warn!(
            "{} non-seed vertices cannot reach the seed set and are excluded",
            reach.unreachable_count
        );
    }

    let op = RestrictedOperator::<T>::new(graph, &active)?;
    let inv_sqrt = op.inv_sqrt_degree().to_vec();
    let mut raw: Vec<Vec<T>> = Vec::with_capacity(order);
    let mut cg_stats = Vec::with_capacity(order);
    for m in 1..=order {
        let rhs = moment_rhs(m, &raw, graph, &active)?;
        let scaled: Vec<T> = rhs.iter().zip(&inv_sqrt).map(|(&b, &s)| b / s).collect();
        let (x, stats) = conjugate_gradient(&op, &scaled, cfg)?;
        log::debug!(
            "moment {m}: {} cg iterations, relative residual {:e}",
            stats.iterations,
            stats.final_rel_residual
        );
        if !stats.converged {
            return Err(HitmixError::NotConverged {
                moment: m,
                iterations: stats.iterations,
                residual: stats.final_rel_residual.to_f64_lossy(),
            });
        }
        raw.push(x.iter().zip(&inv_sqrt).map(|(&x, &s)| x * s).collect());
        cg_stats.push(stats);
    }

    let rows = full
        .vertices()
        .iter()
        .map(|&v| match active.local(v) {
            Some(i) => VertexMoments {
                vertex: v,
                reachable: true,
                raw: raw.iter().map(|moment| moment[i]).collect(),
            },
            None => VertexMoments {
                vertex: v,
                reachable: false,
                raw: Vec::new(),
            },
        })
        .collect();
    Ok(MomentTable {
        rows,
        order,
        cg_stats,
    })
}

/// Sample moments of simulated hitting times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulatedMoments {
    pub mean: f64,
    /// Unbiased sample variance (zero for a single completed walk).
    pub variance: f64,
    pub completed: usize,
    pub truncated: usize,
}

impl SimulatedMoments {
    pub fn standard_error(&self) -> f64 {
        (self.variance / self.completed as f64).sqrt()
    }
}

/// Monte Carlo estimate of the hitting-time mean and variance from one start
/// vertex. Each step moves to a neighbor chosen with probability proportional
/// to its adjacency weight; walks longer than `max_steps` are discarded and
/// counted as truncated.
pub fn simulate_hitting_times(
    graph: &Graph,
    seeds: &SeedSet,
    start_vertex: usize,
    n_walks: usize,
    max_steps: usize,
    rng_seed: u64,
) -> Result<SimulatedMoments> {
    if start_vertex >= graph.n_vertices() {
        return Err(HitmixError::InvalidArgument(format!(
            "start vertex {start_vertex} out of range"
        )));
    }
    if seeds.contains(start_vertex) {
        return Err(HitmixError::InvalidArgument(format!(
            "start vertex {start_vertex} is a seed"
        )));
    }
    if n_walks == 0 {
        return Err(HitmixError::InvalidArgument(
            "n_walks must be at least 1".into(),
        ));
    }
    if graph.degree(start_vertex) == 0 {
        return Err(HitmixError::InvalidArgument(format!(
            "start vertex {start_vertex} is isolated"
        )));
    }

    // One stub per unit of adjacency weight gives O(1) neighbor sampling.
    let n = graph.n_vertices();
    let mut stub_offsets = Vec::with_capacity(n + 1);
    let mut stubs = Vec::new();
    stub_offsets.push(0);
    for v in 0..n {
        for (u, w) in graph.adjacency_row(v) {
            stubs.extend(std::iter::repeat_n(u, w as usize));
        }
        stub_offsets.push(stubs.len());
    }
    let is_seed: Vec<bool> = (0..n).map(|v| seeds.contains(v)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let (mut count, mut mean, mut m2) = (0usize, 0f64, 0f64);
    let mut truncated = 0;
    for _ in 0..n_walks {
        let mut v = start_vertex;
        let mut steps = 0usize;
        let hit = loop {
            if steps == max_steps {
                break false;
            }
            let lo = stub_offsets[v];
            let hi = stub_offsets[v + 1];
            v = stubs[rng.random_range(lo..hi)];
            steps += 1;
            if is_seed[v] {
                break true;
            }
        };
        if hit {
            count += 1;
            let t = steps as f64;
            let delta = t - mean;
            mean += delta / count as f64;
            m2 += delta * (t - mean);
        } else {
            truncated += 1;
        }
    }
    if count == 0 {
        return Err(HitmixError::NoCompletedWalks(truncated));
    }
    let variance = if count > 1 {
        m2 / (count - 1) as f64
    } else {
        0.0
    };
    Ok(SimulatedMoments {
        mean,
        variance,
        completed: count,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_edge_list;

    fn graph(text: &str) -> Graph {
        load_edge_list(text.as_bytes()).unwrap()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial::<f64>(2, 1), 2.0);
        assert_eq!(binomial::<f64>(5, 2), 10.0);
        assert_eq!(binomial::<f64>(6, 3), 20.0);
    }

    #[test]
    fn first_order_rhs_is_ones() {
        let g = graph("0 1\n1 2\n2 0\n2 3");
        let idx = build_nonseed_index(&g, &SeedSet::new([3], 4).unwrap()).unwrap();
        let b = moment_rhs::<f64>(1, &[], &g, &idx).unwrap();
        assert_eq!(b, vec![1.0; 3]);
    }

    #[test]
    fn second_order_rhs_on_path() {
        let g = graph("0 1\n1 2");
        let idx = build_nonseed_index(&g, &SeedSet::new([2], 3).unwrap()).unwrap();
        let b = moment_rhs::<f64>(2, &[vec![4.0, 3.0]], &g, &idx).unwrap();
        assert_eq!(b, vec![7.0, 5.0]);
        let b = moment_rhs::<f64>(2, &[vec![0.0, 0.0]], &g, &idx).unwrap();
        assert_eq!(b, vec![1.0, 1.0]);
    }

    #[test]
    fn rhs_argument_errors() {
        let g = graph("0 1\n1 2");
        let idx = build_nonseed_index(&g, &SeedSet::new([2], 3).unwrap()).unwrap();
        assert!(moment_rhs::<f64>(0, &[], &g, &idx).is_err());
        assert!(moment_rhs::<f64>(2, &[], &g, &idx).is_err());
        assert!(moment_rhs::<f64>(2, &[vec![1.0]], &g, &idx).is_err());
    }

    #[test]
    fn path_moments() {
        let g = graph("0 1\n1 2");
        let seeds = SeedSet::new([2], 3).unwrap();
        let t = compute_moments::<f64>(&g, &seeds, 2, &CgConfig::default()).unwrap();
        let means: Vec<f64> = t.rows.iter().map(|r| r.mean().unwrap()).collect();
        let vars: Vec<f64> = t.rows.iter().map(|r| r.variance().unwrap()).collect();
        assert!((means[0] - 4.0).abs() < 1e-10 && (means[1] - 3.0).abs() < 1e-10);
        assert!((t.rows[0].raw[1] - 24.0).abs() < 1e-9);
        assert!((t.rows[1].raw[1] - 17.0).abs() < 1e-9);
        assert!((vars[0] - 8.0).abs() < 1e-9 && (vars[1] - 8.0).abs() < 1e-9);
    }

    #[test]
    fn third_moment_on_path() {
        // first-step equations below give ET^3 = [208, 147]
        let g = graph("0 1\n1 2");
        let seeds = SeedSet::new([2], 3).unwrap();
        let t = compute_moments::<f64>(&g, &seeds, 3, &CgConfig::default()).unwrap();
        assert_eq!(t.rows[0].raw.len(), 3);
        // first-step: ET3_0 = E(1+T_1)^3 = 1 + 3·3 + 3·17 + ET3_1
        let (a, b) = (t.rows[0].raw[2], t.rows[1].raw[2]);
        assert!((a - (1.0 + 9.0 + 51.0 + b)).abs() < 1e-8);
        // ET3_1 = 1/2·E(1+T_0)^3 + 1/2·1 = 1/2(1 + 12 + 72 + a) + 1/2
        assert!((b - 0.5 * (1.0 + 12.0 + 72.0 + a) - 0.5).abs() < 1e-8);
        assert!((a - 208.0).abs() < 1e-8 && (b - 147.0).abs() < 1e-8);
    }

    #[test]
    fn star_leaves_hit_in_one_step() {
        let g = graph("0 1\n0 2\n0 3\n0 4");
        let seeds = SeedSet::new([0], 5).unwrap();
        let t = compute_moments::<f64>(&g, &seeds, 2, &CgConfig::default()).unwrap();
        for r in &t.rows {
            assert!((r.mean().unwrap() - 1.0).abs() < 1e-12);
            assert!(r.variance().unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn triangle_symmetry() {
        let g = graph("0 1\n1 2\n2 0");
        let seeds = SeedSet::new([2], 3).unwrap();
        let t = compute_moments::<f64>(&g, &seeds, 2, &CgConfig::default()).unwrap();
        assert!((t.rows[0].mean().unwrap() - 2.0).abs() < 1e-10);
        assert!((t.rows[1].mean().unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn f32_moments() {
        let g = graph("0 1\n1 2");
        let seeds = SeedSet::new([2], 3).unwrap();
        let t = compute_moments::<f32>(&g, &seeds, 2, &CgConfig::default()).unwrap();
        assert!((t.rows[0].mean().unwrap() - 4.0).abs() < 1e-3);
        assert!((t.rows[0].variance().unwrap() - 8.0).abs() < 1e-2);
    }

    #[test]
    fn unreachable_vertices_are_flagged() {
        let g = graph("0 1\n1 2\n3 4");
        let seeds = SeedSet::new([2], 5).unwrap();
        let t = compute_moments::<f64>(&g, &seeds, 2, &CgConfig::default()).unwrap();
        assert_eq!(t.unreachable_count(), 2);
        assert!(t.get(3).unwrap().mean().is_none());
        assert!((t.get(0).unwrap().mean().unwrap() - 4.0).abs() < 1e-10);

        let seeds = SeedSet::new([3, 4], 5).unwrap();
        assert!(matches!(
            compute_moments::<f64>(&g, &seeds, 2, &CgConfig::default()),
            Err(HitmixError::AllUnreachable)
        ));
    }

    #[test]
    fn non_convergence_is_an_error() {
        let g = graph("0 1\n1 2\n2 3\n3 4\n4 5");
        let seeds = SeedSet::new([5], 6).unwrap();
        let cfg = CgConfig {
            max_iters: Some(1),
            ..CgConfig::default()
        };
        assert!(matches!(
            compute_moments::<f64>(&g, &seeds, 2, &cfg),
            Err(HitmixError::NotConverged { moment: 1, .. })
        ));
        assert!(compute_moments::<f64>(&g, &seeds, 1, &CgConfig::default()).is_err());
    }

    #[test]
    fn simulation_leaf_next_to_seed() {
        let g = graph("0 1\n0 2");
        let seeds = SeedSet::new([0], 3).unwrap();
        let s = simulate_hitting_times(&g, &seeds, 1, 100, 10, 3).unwrap();
        assert_eq!(s.mean, 1.0);
        assert_eq!(s.variance, 0.0);
        assert_eq!(s.truncated, 0);
    }

    #[test]
    fn simulation_on_path_matches_analytic_mean() {
        let g = graph("0 1\n1 2");
        let seeds = SeedSet::new([2], 3).unwrap();
        let n = 100_000;
        let s = simulate_hitting_times(&g, &seeds, 0, n, 10_000, 42).unwrap();
        let se = (8.0 / n as f64).sqrt();
        assert!((s.mean - 4.0).abs() < 3.0 * se, "mean {}", s.mean);
    }

    #[test]
    fn simulation_errors() {
        let g = graph("0 1\n1 2");
        let seeds = SeedSet::new([2], 3).unwrap();
        assert!(simulate_hitting_times(&g, &seeds, 2, 10, 10, 0).is_err());
        assert!(simulate_hitting_times(&g, &seeds, 0, 0, 10, 0).is_err());
        assert!(matches!(
            simulate_hitting_times(&g, &seeds, 0, 10, 0, 0),
            Err(HitmixError::NoCompletedWalks(10))
        ));
    }
}
