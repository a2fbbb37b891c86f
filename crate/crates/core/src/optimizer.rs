//! The two inverse transform sampling optimizers.
//!
//! [`Variant::Full`] rebuilds the marginal CDF of one randomly chosen
//! coordinate from the whole history before every evaluation and draws the
//! new coordinate by inverting it. [`Variant::Short`] replaces the kernel by
//! an elite window: the new coordinate is uniform between the extremes of
//! that coordinate among the `alpha` best evaluations so far.

use rand::Rng;

use crate::error::{Error, Result};
use crate::eval::{
    run_rng, uniform_in, uniform_point, unit, validate_box, Objective, OptimizationResult, Tracker,
};
use crate::sampling::{
    build_cdf, build_marginal, inverse_cdf_sample, EvaluationHistory, KernelSpec,
};
use crate::scalar::Scalar;

/// Final value of `g(i)` reached at the end of the budget by the default
/// gaussian kernel of the full variant.
pub const DEFAULT_FINAL_SHARPNESS: f64 = 1.0e5;

/// Exponent of the default schedule `g(i) = G (i / f_e)^p`.
pub const DEFAULT_SCHEDULE_POWER: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Full,
    Short,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::Short => "short",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig<T> {
    pub lower_bounds: Vec<T>,
    pub upper_bounds: Vec<T>,
    pub max_evaluations: usize,
    pub seed: u64,
    pub variant: Variant,
    /// Elite count of the short variant.
    pub alpha: usize,
    /// Kernel of the full variant.
    pub kernel: KernelSpec<T>,
    /// Uniform-random evaluations made before any sampling from history;
    /// `None` selects [`default_warmup`].
    pub warmup: Option<usize>,
}

/// `max(2, f_e / 25)`.
pub fn default_alpha(max_evaluations: usize) -> usize {
    (max_evaluations / 25).max(2)
}

/// `max(10, n)` for the full variant. The short variant also fills its
/// elite window before sampling from it, i.e. `max(alpha, 10, n)`. Capped at
/// the budget.
pub fn default_warmup(
    variant: Variant,
    dimension: usize,
    alpha: usize,
    max_evaluations: usize,
) -> usize {
    let base = dimension.max(10);
    let warmup = match variant {
        Variant::Full => base,
        Variant::Short => base.max(alpha),
    };
    warmup.min(max_evaluations)
}

/// Gaussian kernel that stays nearly flat early in the run and sharpens to
/// `g(f_e) =` [`DEFAULT_FINAL_SHARPNESS`] at the end of the budget.
pub fn default_kernel<T: Scalar>(max_evaluations: usize) -> KernelSpec<T> {
    KernelSpec::gaussian_schedule(
        T::lit(DEFAULT_FINAL_SHARPNESS),
        max_evaluations,
        T::lit(DEFAULT_SCHEDULE_POWER),
    )
    .expect("default schedule is valid")
}

impl<T: Scalar> OptimizerConfig<T> {
    /// Configuration with default alpha, kernel, warmup and seed 0.
    pub fn new(
        lower_bounds: Vec<T>,
        upper_bounds: Vec<T>,
        max_evaluations: usize,
        variant: Variant,
    ) -> Self {
        Self {
            lower_bounds,
            upper_bounds,
            max_evaluations,
            seed: 0,
            variant,
            alpha: default_alpha(max_evaluations),
            kernel: default_kernel(max_evaluations),
            warmup: None,
        }
    }

    /// Same bounds `[lo, hi]` on every one of `dimension` coordinates.
    pub fn cube(dimension: usize, lo: T, hi: T, max_evaluations: usize, variant: Variant) -> Self {
        Self::new(
            vec![lo; dimension],
            vec![hi; dimension],
            max_evaluations,
            variant,
        )
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_alpha(mut self, alpha: usize) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_kernel(mut self, kernel: KernelSpec<T>) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn with_warmup(mut self, warmup: usize) -> Self {
        self.warmup = Some(warmup);
        self
    }

    pub fn effective_warmup(&self) -> usize {
        self.warmup.unwrap_or_else(|| {
            default_warmup(
                self.variant,
                self.dimension(),
                self.alpha,
                self.max_evaluations,
            )
        })
    }

    pub fn dimension(&self) -> usize {
        self.lower_bounds.len()
    }

    pub fn validate(&self) -> Result<()> {
        validate_box(&self.lower_bounds, &self.upper_bounds)?;
        if self.max_evaluations < 2 {
            return Err(Error::InvalidConfig(
                "max_evaluations must be at least 2".into(),
            ));
        }
        let warmup = self.effective_warmup();
        if warmup < 2 || warmup > self.max_evaluations {
            return Err(Error::InvalidConfig(format!(
                "warmup must lie in [2, {}], got {warmup}",
                self.max_evaluations
            )));
        }
        if self.alpha < 2 {
            return Err(Error::InvalidConfig(format!(
                "alpha must be at least 2, got {}",
                self.alpha
            )));
        }
        self.kernel.validate()
    }
}

/// Runs the variant selected by `config.variant`.
pub fn optimize<T: Scalar, O: Objective<T> + ?Sized>(
    config: &OptimizerConfig<T>,
    objective: &mut O,
) -> Result<OptimizationResult<T>> {
    optimize_with_history(config, objective).map(|(result, _)| result)
}

/// Like [`optimize`], also returning every evaluated point.
pub fn optimize_with_history<T: Scalar, O: Objective<T> + ?Sized>(
    config: &OptimizerConfig<T>,
    objective: &mut O,
) -> Result<(OptimizationResult<T>, EvaluationHistory<T>)> {
    match config.variant {
        Variant::Full => run_full(config, objective),
        Variant::Short => run_short(config, objective),
    }
}

pub fn optimize_full<T: Scalar, O: Objective<T> + ?Sized>(
    config: &OptimizerConfig<T>,
    objective: &mut O,
) -> Result<OptimizationResult<T>> {
    expect_variant(config, Variant::Full)?;
    run_full(config, objective).map(|(result, _)| result)
}

pub fn optimize_short<T: Scalar, O: Objective<T> + ?Sized>(
    config: &OptimizerConfig<T>,
    objective: &mut O,
) -> Result<OptimizationResult<T>> {
    expect_variant(config, Variant::Short)?;
    run_short(config, objective).map(|(result, _)| result)
}

fn expect_variant<T>(config: &OptimizerConfig<T>, variant: Variant) -> Result<()> {
    if config.variant != variant {
        return Err(Error::InvalidConfig(format!(
            "expected the {} variant, configuration selects {}",
            variant.name(),
            config.variant.name()
        )));
    }
    Ok(())
}

fn warm_up<T: Scalar, O: Objective<T> + ?Sized>(
    config: &OptimizerConfig<T>,
    tracker: &mut Tracker<'_, T, O>,
    rng: &mut crate::eval::RunRng,
) -> Result<()> {
    for _ in 0..config.effective_warmup() {
        let point = uniform_point(rng, &config.lower_bounds, &config.upper_bounds);
        tracker.evaluate(&point)?;
    }
    Ok(())
}

/// Marginal distribution of coordinate `dim` after `history` as the full
/// variant sees it, CDF included.
pub fn full_marginal<T: Scalar>(
    config: &OptimizerConfig<T>,
    history: &EvaluationHistory<T>,
    dim: usize,
) -> Result<crate::sampling::EmpiricalMarginal<T>> {
    let bounds = (config.lower_bounds[dim], config.upper_bounds[dim]);
    build_marginal(history, dim, &config.kernel, bounds, history.len()).and_then(build_cdf)
}

fn run_full<T: Scalar, O: Objective<T> + ?Sized>(
    config: &OptimizerConfig<T>,
    objective: &mut O,
) -> Result<(OptimizationResult<T>, EvaluationHistory<T>)> {
    config.validate()?;
    let n = config.dimension();
    let mut rng = run_rng(config.seed);
    let mut tracker = Tracker::new(objective, n, config.max_evaluations)?;
    warm_up(config, &mut tracker, &mut rng)?;

    let mut x = tracker.best_point().to_vec();
    while !tracker.exhausted() {
        let j = rng.gen_range(0..n);
        let r: T = unit(&mut rng);
        x[j] = match full_marginal(config, tracker.history(), j) {
            Ok(marginal) => inverse_cdf_sample(&marginal, r)?,
            // Too little distinct information in this coordinate yet.
            Err(_) => {
                let (lo, hi) = (config.lower_bounds[j], config.upper_bounds[j]);
                (lo + r * (hi - lo)).max(lo).min(hi)
            }
        };
        tracker.evaluate(&x)?;
        x.copy_from_slice(tracker.best_point());
    }
    Ok(tracker.finish())
}

/// The `alpha` lowest objective values seen so far, as `(value, history index)`
/// in ascending order; ties keep the earlier evaluation first.
struct EliteSet<T> {
    alpha: usize,
    members: Vec<(T, usize)>,
}

impl<T: Scalar> EliteSet<T> {
    fn new(alpha: usize) -> Self {
        Self {
            alpha,
            members: Vec::with_capacity(alpha + 1),
        }
    }

    fn insert(&mut self, value: T, index: usize) {
        let pos = self.members.partition_point(|&(v, _)| v <= value);
        if pos < self.alpha {
            self.members.insert(pos, (value, index));
            self.members.truncate(self.alpha);
        }
    }

    fn coordinate_range(&self, history: &EvaluationHistory<T>, dim: usize) -> (T, T) {
        self.members
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &(_, i)| {
                let c = history.coordinate(i, dim);
                (lo.min(c), hi.max(c))
            })
    }
}

fn run_short<T: Scalar, O: Objective<T> + ?Sized>(
    config: &OptimizerConfig<T>,
    objective: &mut O,
) -> Result<(OptimizationResult<T>, EvaluationHistory<T>)> {
    config.validate()?;
    let n = config.dimension();
    let mut rng = run_rng(config.seed);
    let mut tracker = Tracker::new(objective, n, config.max_evaluations)?;
    let mut elites = EliteSet::new(config.alpha);

    for _ in 0..config.effective_warmup() {
        let point = uniform_point(&mut rng, &config.lower_bounds, &config.upper_bounds);
        let (value, _) = tracker.evaluate(&point)?;
        elites.insert(value, tracker.used() - 1);
    }

    let mut x = tracker.best_point().to_vec();
    'sweeps: loop {
        for j in 0..n {
            if tracker.exhausted() {
                break 'sweeps;
            }
            let (lo, hi) = elites.coordinate_range(tracker.history(), j);
            x[j] = uniform_in(&mut rng, lo, hi);
            let (value, _) = tracker.evaluate(&x)?;
            elites.insert(value, tracker.used() - 1);
            x.copy_from_slice(tracker.best_point());
        }
    }
    Ok(tracker.finish())
}
