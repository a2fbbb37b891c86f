//! Derivative-free global optimization by inverse transform sampling.
//!
//! The optimizer builds, for one coordinate at a time, an empirical
//! distribution of where the minimum is likely to lie, using an
//! order-reversing kernel over all objective values seen so far, and draws
//! the next coordinate by inverting that distribution's CDF. A cheaper
//! variant samples uniformly inside the coordinate range of the best
//! `alpha` evaluations.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below fix the common double-precision case.

pub mod baselines;
pub mod error;
pub mod eval;
pub mod external;
pub mod harness;
pub mod objectives;
pub mod optimizer;
pub mod sampling;
pub mod scalar;

pub use baselines::{de_rand_1_bin, random_search, run_baseline, BaselineConfig, BaselineKind};
pub use error::{Error, Result};
pub use eval::{Objective, OptimizationResult, TracePoint};
pub use harness::{
    aggregate_h, average_runs, normalize_history, normalize_jointly, run_grid, run_grid_to_dir,
    write_trace, AggregateHistory, GridResult, OptimizerKind, RunGrid,
};
pub use objectives::{list_objectives, Benchmark, ObjectiveSpec};
pub use optimizer::{optimize, optimize_full, optimize_short, OptimizerConfig, Variant};
pub use sampling::{
    build_cdf, build_marginal, inverse_cdf_sample, kernel_apply, EmpiricalMarginal,
    EvaluationHistory, KernelSpec,
};
pub use scalar::Scalar;

pub type History64 = EvaluationHistory<f64>;
pub type Kernel64 = KernelSpec<f64>;
pub type Marginal64 = EmpiricalMarginal<f64>;
pub type Config64 = OptimizerConfig<f64>;
pub type Result64 = OptimizationResult<f64>;
pub type BaselineConfig64 = BaselineConfig<f64>;
pub type Grid64 = RunGrid<f64>;
pub type GridResult64 = GridResult<f64>;
pub type Aggregate64 = AggregateHistory<f64>;

pub type History32 = EvaluationHistory<f32>;
pub type Marginal32 = EmpiricalMarginal<f32>;
pub type Config32 = OptimizerConfig<f32>;
