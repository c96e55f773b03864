#![allow(dead_code)]

use hitmix::{Graph, SeedSet};
use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::Rng;

/// G(n, p) by direct pair enumeration.
pub fn erdos_renyi<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

pub fn is_connected(g: &Graph) -> bool {
    let n = g.n_vertices();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for (u, _) in g.neighbors(v) {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

pub fn connected_erdos_renyi<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    loop {
        let g = erdos_renyi(n, p, rng);
        if is_connected(&g) {
            return g;
        }
    }
}

pub fn random_seeds<R: Rng>(n: usize, k: usize, rng: &mut R) -> SeedSet {
    SeedSet::new(sample(rng, n, k), n).unwrap()
}

/// Transition matrix of the walk restricted to the non-seed vertices, in
/// ascending vertex order.
pub fn transient_block(g: &Graph, seeds: &SeedSet) -> (Vec<usize>, DMatrix<f64>) {
    let free: Vec<usize> = (0..g.n_vertices())
        .filter(|&v| !seeds.contains(v))
        .collect();
    let pos = |v: usize| free.binary_search(&v).ok();
    let mut q = DMatrix::zeros(free.len(), free.len());
    for (i, &v) in free.iter().enumerate() {
        let d = g.degree(v) as f64;
        for (u, w) in g.adjacency_row(v) {
            if let Some(j) = pos(u) {
                q[(i, j)] += w as f64 / d;
            }
        }
    }
    (free, q)
}

/// Raw hitting-time moments `E[T^k]`, `k = 1..=order`, of an absorbing chain
/// with transient block `q`, from `(I - Q) x_k = 1 + Σ_{s=1}^{k-1} C(k,s) Q x_s`.
pub fn dense_raw_moments(q: &DMatrix<f64>, order: usize) -> Vec<DVector<f64>> {
    let n = q.nrows();
    let lu = (DMatrix::identity(n, n) - q).lu();
    let mut out: Vec<DVector<f64>> = Vec::new();
    for k in 1..=order {
        let mut rhs = DVector::from_element(n, 1.0);
        let mut c = 1.0;
        for s in 1..k {
            c = c * (k - s + 1) as f64 / s as f64;
            rhs += c * (q * &out[s - 1]);
        }
        out.push(lu.solve(&rhs).expect("I - Q is nonsingular"));
    }
    out
}

/// Mean and variance from the fundamental matrix `N = (I - Q)^{-1}`:
/// `E T = N 1`, `E T^2 = (2N - I) E T`.
pub fn fundamental_mean_variance(q: &DMatrix<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = q.nrows();
    let fundamental = (DMatrix::identity(n, n) - q)
        .try_inverse()
        .expect("I - Q is nonsingular");
    let mean = &fundamental * DVector::from_element(n, 1.0);
    let second = (2.0 * &fundamental - DMatrix::identity(n, n)) * &mean;
    let var = second
        .iter()
        .zip(mean.iter())
        .map(|(s, m)| s - m * m)
        .collect();
    (mean.iter().copied().collect(), var)
}
