//! Per-dimension empirical distributions built from evaluation history.
//!
//! Objective values are mapped to probability mass by an order-reversing
//! kernel, the mass is spread over the sorted coordinates of one dimension,
//! integrated with the trapezoid rule into a piecewise-linear CDF, and that
//! CDF is inverted to draw new coordinates.

mod history;
mod kernel;
mod marginal;

pub use history::EvaluationHistory;
pub use kernel::{kernel_apply, KernelSpec, DEFAULT_EPSILON0};
pub use marginal::{
    build_cdf, build_marginal, inverse_cdf_sample, EmpiricalMarginal, DUPLICATE_TOLERANCE,
};
