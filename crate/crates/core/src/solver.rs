//! Matrix-free restricted normalized operator `I - D^{-1/2} A D^{-1/2}` over
//! the non-seed vertices, and plain conjugate gradient for it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{HitmixError, Result};
use crate::graph::{Graph, NonSeedIndex};
use crate::scalar::{dot, norm, Scalar};

/// Iterations between recomputations of the true residual `b - Hx`.
const RESIDUAL_REFRESH: usize = 50;

pub trait LinearOperator<T: Scalar> {
    fn dim(&self) -> usize;

    /// `y = H x`; both slices have length `dim()`.
    fn apply_into(&self, x: &[T], y: &mut [T]);
}

/// `H = Π^T (I - Â) Π` over the vertices of a [`NonSeedIndex`].
///
/// Only the entries of `Â` with both endpoints in the index are stored, in a
/// local CSR copy with the `1/sqrt(d_i d_j)` scaling folded in.
#[derive(Debug, Clone)]
pub struct RestrictedOperator<T> {
    offsets: Vec<usize>,
    columns: Vec<u32>,
    values: Vec<T>,
    inv_sqrt_degree: Vec<T>,
}

impl<T: Scalar> RestrictedOperator<T> {
    pub fn new(graph: &Graph, index: &NonSeedIndex) -> Result<Self> {
        if index.n_vertices() != graph.n_vertices() {
            return Err(HitmixError::DimensionMismatch {
                expected: graph.n_vertices(),
                actual: index.n_vertices(),
            });
        }
        if u32::try_from(index.len()).is_err() {
            return Err(HitmixError::InvalidArgument(format!(
                "{} non-seed vertices exceed the operator's 32-bit index range",
                index.len()
            )));
        }
        let inv_sqrt_degree: Vec<T> = index
            .vertices()
            .iter()
            .map(|&v| {
                let d = graph.degree(v);
                if d == 0 {
                    T::zero()
                } else {
                    T::one() / T::from_u64(d).expect("degree representable").sqrt()
                }
            })
            .collect();
        let mut offsets = Vec::with_capacity(index.len() + 1);
        let mut columns = Vec::new();
        let mut values = Vec::new();
        offsets.push(0);
        for (i, &v) in index.vertices().iter().enumerate() {
            for (u, w) in graph.adjacency_row(v) {
                if let Some(j) = index.local(u) {
                    columns.push(j as u32);
                    values.push(
                        T::from_u64(w).expect("weight representable")
                            * inv_sqrt_degree[i]
                            * inv_sqrt_degree[j],
                    );
                }
            }
            offsets.push(columns.len());
        }
        Ok(RestrictedOperator {
            offsets,
            columns,
            values,
            inv_sqrt_degree,
        })
    }

    /// `d_i^{-1/2}` for each local coordinate.
    pub fn inv_sqrt_degree(&self) -> &[T] {
        &self.inv_sqrt_degree
    }

    /// Number of stored off-identity entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }
}

impl<T: Scalar> LinearOperator<T> for RestrictedOperator<T> {
    fn dim(&self) -> usize {
        self.inv_sqrt_degree.len()
    }

    fn apply_into(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let range = self.offsets[i]..self.offsets[i + 1];
            let s = self.columns[range.clone()]
                .iter()
                .zip(&self.values[range])
                .fold(T::zero(), |acc, (&j, &a)| acc + a * x[j as usize]);
            *yi = x[i] - s;
        }
    }
}

pub fn apply_restricted_operator<T: Scalar, Op: LinearOperator<T>>(
    op: &Op,
    x: &[T],
) -> Result<Vec<T>> {
    if x.len() != op.dim() {
        return Err(HitmixError::DimensionMismatch {
            expected: op.dim(),
            actual: x.len(),
        });
    }
    let mut y = vec![T::zero(); x.len()];
    op.apply_into(x, &mut y);
    Ok(y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgStart {
    Zeros,
    /// Uniform entries in `[-1, 1)` from a seeded generator.
    Random(u64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgConfig<T> {
    pub rel_tol: T,
    /// `None` selects `max(10 * dim, 1000)`.
    pub max_iters: Option<usize>,
    pub start: CgStart,
}

impl<T: Scalar> Default for CgConfig<T> {
    fn default() -> Self {
        CgConfig {
            rel_tol: T::lit(T::DEFAULT_CG_TOL),
            max_iters: None,
            start: CgStart::Zeros,
        }
    }
}

impl<T: Scalar> CgConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > T::zero() && self.rel_tol < T::one()) {
            return Err(HitmixError::InvalidArgument(format!(
                "cg rel_tol must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        if self.max_iters == Some(0) {
            return Err(HitmixError::InvalidArgument(
                "cg max_iters must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn iteration_limit(&self, dim: usize) -> usize {
        self.max_iters.unwrap_or_else(|| (10 * dim).max(1000))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CgStats<T> {
    pub iterations: usize,
    pub final_rel_residual: T,
    pub converged: bool,
}

fn true_residual<T: Scalar, Op: LinearOperator<T>>(op: &Op, b: &[T], x: &[T], r: &mut [T]) {
    op.apply_into(x, r);
    for (ri, &bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
}

/// Solves `H x = b` for symmetric positive definite `H`.
///
/// Stops once `‖b - Hx‖₂ / ‖b‖₂ <= rel_tol` for the true (recomputed)
/// residual, or after the iteration limit with `converged = false`. A
/// non-positive or non-finite curvature `pᵀHp` is reported as
/// [`HitmixError::SolverBreakdown`].
pub fn conjugate_gradient<T: Scalar, Op: LinearOperator<T>>(
    op: &Op,
    b: &[T],
    cfg: &CgConfig<T>,
) -> Result<(Vec<T>, CgStats<T>)> {
    cfg.validate()?;
    let n = op.dim();
    if b.len() != n {
        return Err(HitmixError::DimensionMismatch {
            expected: n,
            actual: b.len(),
        });
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(HitmixError::InvalidArgument(
            "right-hand side has non-finite entries".into(),
        ));
    }
    let b_norm = norm(b);
    if b_norm == T::zero() {
        return Ok((
            vec![T::zero(); n],
            CgStats {
                iterations: 0,
                final_rel_residual: T::zero(),
                converged: true,
            },
        ));
    }

    let mut x = match cfg.start {
        CgStart::Zeros => vec![T::zero(); n],
        CgStart::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n).map(|_| T::symmetric_unit(&mut rng)).collect()
        }
    };
    let x0 = x.clone();
    let mut r = vec![T::zero(); n];
    true_residual(op, b, &x, &mut r);
    let mut rr = dot(&r, &r);
    let initial_rel = rr.sqrt() / b_norm;
    if !initial_rel.is_finite() {
        return Err(HitmixError::SolverBreakdown {
            iteration: 0,
            reason: "non-finite initial residual".into(),
        });
    }
    if initial_rel <= cfg.rel_tol {
        return Ok((
            x,
            CgStats {
                iterations: 0,
                final_rel_residual: initial_rel,
                converged: true,
            },
        ));
    }

    let max_iters = cfg.iteration_limit(n);
    let mut p = r.clone();
    let mut hp = vec![T::zero(); n];
    let mut rel = initial_rel;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iters {
        iterations += 1;
        op.apply_into(&p, &mut hp);
        let curvature = dot(&p, &hp);
        if !curvature.is_finite() || curvature <= T::zero() {
            return Err(HitmixError::SolverBreakdown {
                iteration: iterations,
                reason: format!("curvature pᵀHp = {curvature:e}"),
            });
        }
        let alpha = rr / curvature;
        for (xi, &pi) in x.iter_mut().zip(&p) {
            *xi = *xi + alpha * pi;
        }
        if iterations % RESIDUAL_REFRESH == 0 {
            true_residual(op, b, &x, &mut r);
        } else {
            for (ri, &hpi) in r.iter_mut().zip(&hp) {
                *ri = *ri - alpha * hpi;
            }
        }
        let rr_new = dot(&r, &r);
        if !rr_new.is_finite() {
            return Err(HitmixError::SolverBreakdown {
                iteration: iterations,
                reason: "non-finite residual".into(),
            });
        }
        rel = rr_new.sqrt() / b_norm;
        if rel <= cfg.rel_tol {
            // The recursive residual can drift below the true one.
            true_residual(op, b, &x, &mut r);
            let rr_true = dot(&r, &r);
            rel = rr_true.sqrt() / b_norm;
            if rel <= cfg.rel_tol {
                converged = true;
                break;
            }
            rr = rr_true;
            p.copy_from_slice(&r);
            continue;
        }
        let beta = rr_new / rr;
        for (pi, &ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_new;
    }

    if !converged {
        true_residual(op, b, &x, &mut r);
        rel = norm(&r) / b_norm;
        if rel > initial_rel {
            x = x0;
            rel = initial_rel;
        }
    }
    Ok((
        x,
        CgStats {
            iterations,
            final_rel_residual: rel,
            converged,
        },
    ))
}
