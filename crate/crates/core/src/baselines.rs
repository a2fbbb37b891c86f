//! Control optimizers: uniform random search and DE/rand/1/bin.

use rand::Rng;

use crate::error::{Error, Result};
use crate::eval::{
    run_rng, uniform_point, unit, validate_box, Objective, OptimizationResult, RunRng, Tracker,
};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaselineKind {
    RandomSearch,
    DeRand1Bin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig<T> {
    pub kind: BaselineKind,
    pub lower_bounds: Vec<T>,
    pub upper_bounds: Vec<T>,
    pub max_evaluations: usize,
    pub seed: u64,
    /// DE population size, `10 n` by default.
    pub de_population: usize,
    /// DE differential weight in `(0, 2]`.
    pub de_f: T,
    /// DE crossover rate in `[0, 1]`.
    pub de_cr: T,
}

impl<T: Scalar> BaselineConfig<T> {
    pub fn new(
        kind: BaselineKind,
        lower_bounds: Vec<T>,
        upper_bounds: Vec<T>,
        max_evaluations: usize,
    ) -> Self {
        let n = lower_bounds.len();
        Self {
            kind,
            lower_bounds,
            upper_bounds,
            max_evaluations,
            seed: 0,
            de_population: (10 * n).max(4),
            de_f: T::lit(0.8),
            de_cr: T::lit(0.9),
        }
    }

    pub fn cube(
        kind: BaselineKind,
        dimension: usize,
        lo: T,
        hi: T,
        max_evaluations: usize,
    ) -> Self {
        Self::new(
            kind,
            vec![lo; dimension],
            vec![hi; dimension],
            max_evaluations,
        )
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn dimension(&self) -> usize {
        self.lower_bounds.len()
    }

    pub fn validate(&self) -> Result<()> {
        validate_box(&self.lower_bounds, &self.upper_bounds)?;
        if self.max_evaluations == 0 {
            return Err(Error::InvalidConfig(
                "max_evaluations must be positive".into(),
            ));
        }
        if self.kind == BaselineKind::DeRand1Bin {
            if self.de_population < 4 {
                return Err(Error::InvalidConfig(format!(
                    "DE population must be at least 4, got {}",
                    self.de_population
                )));
            }
            // F = 0 is allowed for fixed-point experiments.
            if !(self.de_f >= T::zero() && self.de_f <= T::lit(2.0)) {
                return Err(Error::InvalidConfig(format!(
                    "DE F must lie in (0, 2], got {}",
                    self.de_f
                )));
            }
            if !(self.de_cr >= T::zero() && self.de_cr <= T::one()) {
                return Err(Error::InvalidConfig(format!(
                    "DE CR must lie in [0, 1], got {}",
                    self.de_cr
                )));
            }
        }
        Ok(())
    }
}

pub fn run_baseline<T: Scalar, O: Objective<T> + ?Sized>(
    config: &BaselineConfig<T>,
    objective: &mut O,
) -> Result<OptimizationResult<T>> {
    match config.kind {
        BaselineKind::RandomSearch => random_search(config, objective),
        BaselineKind::DeRand1Bin => de_rand_1_bin(config, objective),
    }
}

pub fn random_search<T: Scalar, O: Objective<T> + ?Sized>(
    config: &BaselineConfig<T>,
    objective: &mut O,
) -> Result<OptimizationResult<T>> {
    config.validate()?;
    let mut rng = run_rng(config.seed);
    let mut tracker = Tracker::new(objective, config.dimension(), config.max_evaluations)?;
    while !tracker.exhausted() {
        let x = uniform_point(&mut rng, &config.lower_bounds, &config.upper_bounds);
        tracker.evaluate(&x)?;
    }
    Ok(tracker.finish().0)
}

/// Three distinct member indices, all different from `target`.
fn pick_three(rng: &mut RunRng, population: usize, target: usize) -> [usize; 3] {
    let mut picked = [usize::MAX; 3];
    let mut k = 0;
    while k < 3 {
        let c = rng.gen_range(0..population);
        if c != target && !picked[..k].contains(&c) {
            picked[k] = c;
            k += 1;
        }
    }
    picked
}

/// `a + F (b - c)`, clipped to the box.
pub(crate) fn mutant<T: Scalar>(
    a: &[T],
    b: &[T],
    c: &[T],
    f: T,
    lower: &[T],
    upper: &[T],
) -> Vec<T> {
    (0..a.len())
        .map(|j| (a[j] + f * (b[j] - c[j])).max(lower[j]).min(upper[j]))
        .collect()
}

/// Binomial crossover: each coordinate comes from the mutant with
/// probability `cr`, coordinate `forced` always does.
pub(crate) fn crossover<T: Scalar>(
    rng: &mut RunRng,
    target: &[T],
    mutant: &[T],
    cr: T,
    forced: usize,
) -> Vec<T> {
    target
        .iter()
        .zip(mutant)
        .enumerate()
        .map(|(j, (&t, &m))| {
            if j == forced || unit::<T>(rng) < cr {
                m
            } else {
                t
            }
        })
        .collect()
}

struct DePopulation<T> {
    members: Vec<Vec<T>>,
    fitness: Vec<T>,
}

impl<T: Scalar> DePopulation<T> {
    /// One synchronous generation. Returns `false` when the budget ran out
    /// before every member produced a trial.
    fn generation<O: Objective<T> + ?Sized>(
        &mut self,
        config: &BaselineConfig<T>,
        tracker: &mut Tracker<'_, T, O>,
        rng: &mut RunRng,
    ) -> Result<bool> {
        let (lower, upper) = (&config.lower_bounds, &config.upper_bounds);
        let np = self.members.len();
        let mut next = self.members.clone();
        let mut next_fitness = self.fitness.clone();
        let mut complete = true;
        for target in 0..np {
            if tracker.exhausted() {
                complete = false;
                break;
            }
            let [a, b, c] = pick_three(rng, np, target);
            let v = mutant(
                &self.members[a],
                &self.members[b],
                &self.members[c],
                config.de_f,
                lower,
                upper,
            );
            let forced = rng.gen_range(0..config.dimension());
            let trial = crossover(rng, &self.members[target], &v, config.de_cr, forced);
            let (value, _) = tracker.evaluate(&trial)?;
            if value <= self.fitness[target] {
                next[target] = trial;
                next_fitness[target] = value;
            }
        }
        self.members = next;
        self.fitness = next_fitness;
        Ok(complete)
    }
}

pub fn de_rand_1_bin<T: Scalar, O: Objective<T> + ?Sized>(
    config: &BaselineConfig<T>,
    objective: &mut O,
) -> Result<OptimizationResult<T>> {
    de_run(config, objective, |_| {})
}

fn de_run<T: Scalar, O: Objective<T> + ?Sized>(
    config: &BaselineConfig<T>,
    objective: &mut O,
    mut on_generation: impl FnMut(&DePopulation<T>),
) -> Result<OptimizationResult<T>> {
    config.validate()?;
    let n = config.dimension();
    let mut rng = run_rng(config.seed);
    let mut tracker = Tracker::new(objective, n, config.max_evaluations)?;

    let mut population = DePopulation {
        members: Vec::with_capacity(config.de_population),
        fitness: Vec::with_capacity(config.de_population),
    };
    for _ in 0..config.de_population {
        if tracker.exhausted() {
            return Ok(tracker.finish().0);
        }
        let x = uniform_point(&mut rng, &config.lower_bounds, &config.upper_bounds);
        population.fitness.push(tracker.evaluate(&x)?.0);
        population.members.push(x);
    }
    on_generation(&population);
    while population.generation(config, &mut tracker, &mut rng)? {
        on_generation(&population);
    }
    Ok(tracker.finish().0)
}
