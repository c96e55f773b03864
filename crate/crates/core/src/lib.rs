//! Seed-set expansion on undirected graphs.
//!
//! Given a graph and a seed set `Ω`, the pipeline computes the mean and
//! variance of the random-walk hitting time to `Ω` for every other vertex by
//! solving sparse symmetric positive definite systems with conjugate gradient,
//! fits a lognormal mixture model to pseudo-samples drawn from those moments,
//! and reports each vertex's posterior probability of belonging to the goal
//! component (the one with the smallest fitted mean hitting time).
//!
//! The numerical core is generic over [`Scalar`] (`f32` and `f64`); the
//! `*64` aliases below name the double-precision instantiations used by the
//! CLI and the benchmark harness.

pub mod cli;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod mixture;
pub mod moments;
pub mod sbm;
pub mod scalar;
pub mod solver;

pub use error::{HitmixError, Result};
pub use graph::{
    build_nonseed_index, load_edge_list, load_seed_list, reachable_from, Graph, NonSeedIndex,
    ReachabilityReport, SeedSet,
};
pub use metrics::{adjusted_rand_index, percentiles, precision_recall_f1, LabelVector, Prf1};
pub use mixture::{
    bic, draw_pseudo_samples, em_fit, hitmix, lognormal_mom, BicSampleSize, HitmixConfig,
    LognormalParams, MembershipResult, MixtureFit, VertexSamples,
};
pub use moments::{compute_moments, moment_rhs, simulate_hitting_times, MomentTable};
pub use sbm::{
    run_simulation, sample_hitting_set, sample_sbm, McSummary, SbmConfig, SimulationSpec,
};
pub use scalar::Scalar;
pub use solver::{
    apply_restricted_operator, conjugate_gradient, CgConfig, CgStart, CgStats, LinearOperator,
    RestrictedOperator,
};

pub type CgConfig64 = CgConfig<f64>;
pub type CgStats64 = CgStats<f64>;
pub type MomentTable64 = MomentTable<f64>;
pub type LognormalParams64 = LognormalParams<f64>;
pub type VertexSamples64 = VertexSamples<f64>;
pub type MixtureFit64 = MixtureFit<f64>;
pub type HitmixConfig64 = HitmixConfig<f64>;
pub type MembershipResult64 = MembershipResult<f64>;

pub type CgConfig32 = CgConfig<f32>;
pub type MomentTable32 = MomentTable<f32>;
pub type HitmixConfig32 = HitmixConfig<f32>;
pub type MembershipResult32 = MembershipResult<f32>;
