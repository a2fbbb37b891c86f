//! Black-box evaluation plumbing shared by every optimizer.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sampling::EvaluationHistory;
use crate::scalar::Scalar;

/// A black-box function `x -> f(x)`.
///
/// A single optimization run calls the objective strictly sequentially.
/// Objectives shared between concurrent runs must be reentrant or
/// serialized by the caller.
pub trait Objective<T> {
    fn evaluate(&mut self, x: &[T]) -> Result<T>;
}

impl<T, F> Objective<T> for F
where
    F: FnMut(&[T]) -> T,
{
    fn evaluate(&mut self, x: &[T]) -> Result<T> {
        Ok(self(x))
    }
}

/// One entry of a best-so-far trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint<T> {
    /// 1-based count of objective calls made so far.
    pub evaluation: usize,
    pub best_value: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult<T> {
    pub best_point: Vec<T>,
    pub best_value: T,
    pub trace: Vec<TracePoint<T>>,
    pub evaluations_used: usize,
}

impl<T: Scalar> OptimizationResult<T> {
    /// Best-so-far values in evaluation order.
    pub fn best_values(&self) -> Vec<T> {
        self.trace.iter().map(|p| p.best_value).collect()
    }
}

pub(crate) type RunRng = ChaCha8Rng;

pub(crate) fn run_rng(seed: u64) -> RunRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[inline]
pub(crate) fn unit<T: Scalar>(rng: &mut RunRng) -> T {
    T::lit(rng.gen::<f64>())
}

#[inline]
pub(crate) fn uniform_in<T: Scalar>(rng: &mut RunRng, lo: T, hi: T) -> T {
    (lo + unit::<T>(rng) * (hi - lo)).max(lo).min(hi)
}

pub(crate) fn uniform_point<T: Scalar>(rng: &mut RunRng, lower: &[T], upper: &[T]) -> Vec<T> {
    lower
        .iter()
        .zip(upper)
        .map(|(&lo, &hi)| uniform_in(rng, lo, hi))
        .collect()
}

pub(crate) fn validate_box<T: Scalar>(lower: &[T], upper: &[T]) -> Result<()> {
    if lower.is_empty() {
        return Err(Error::InvalidConfig("dimension must be positive".into()));
    }
    if lower.len() != upper.len() {
        return Err(Error::InvalidConfig(format!(
            "{} lower bounds but {} upper bounds",
            lower.len(),
            upper.len()
        )));
    }
    for (j, (lo, hi)) in lower.iter().zip(upper).enumerate() {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidConfig(format!(
                "bounds of dimension {j} must satisfy lower < upper, got [{lo}, {hi}]"
            )));
        }
    }
    Ok(())
}

/// Wraps an objective with budget accounting, incumbent tracking and the
/// best-so-far trace. Accepts a point when `f <= best`.
pub(crate) struct Tracker<'o, T, O: ?Sized> {
    objective: &'o mut O,
    budget: usize,
    history: EvaluationHistory<T>,
    best_point: Vec<T>,
    best_value: T,
    trace: Vec<TracePoint<T>>,
}

impl<'o, T: Scalar, O: Objective<T> + ?Sized> Tracker<'o, T, O> {
    pub fn new(objective: &'o mut O, dimension: usize, budget: usize) -> Result<Self> {
        Ok(Self {
            objective,
            budget,
            history: EvaluationHistory::with_capacity(dimension, budget)?,
            best_point: Vec::new(),
            best_value: T::infinity(),
            trace: Vec::with_capacity(budget),
        })
    }

    pub fn exhausted(&self) -> bool {
        self.trace.len() >= self.budget
    }

    pub fn used(&self) -> usize {
        self.trace.len()
    }

    pub fn history(&self) -> &EvaluationHistory<T> {
        &self.history
    }

    pub fn best_point(&self) -> &[T] {
        &self.best_point
    }

    /// Evaluates `x`, returning the objective value and whether it became
    /// the incumbent.
    pub fn evaluate(&mut self, x: &[T]) -> Result<(T, bool)> {
        debug_assert!(!self.exhausted(), "objective called past the budget");
        let index = self.trace.len() + 1;
        let value = self.objective.evaluate(x)?;
        if !value.is_finite() {
            return Err(Error::NonFiniteEvaluation {
                index,
                point: x.iter().map(|v| v.as_f64()).collect(),
                value: value.as_f64(),
            });
        }
        self.history.push(x, value)?;
        let improved = value <= self.best_value;
        if improved {
            self.best_value = value;
            self.best_point.clear();
            self.best_point.extend_from_slice(x);
        }
        self.trace.push(TracePoint {
            evaluation: index,
            best_value: self.best_value,
        });
        Ok((value, improved))
    }

    pub fn finish(self) -> (OptimizationResult<T>, EvaluationHistory<T>) {
        let result = OptimizationResult {
            best_point: self.best_point,
            best_value: self.best_value,
            evaluations_used: self.trace.len(),
            trace: self.trace,
        };
        (result, self.history)
    }
}
