//! Benchmark grids and the aggregate convergence metric `h`.
//!
//! For every optimizer, the best-so-far traces of each objective are
//! averaged over repeats and min-max normalized to `[0, 1]` against the
//! range spanned by all optimizers on that objective. The normalized
//! curves are averaged across objectives and raised to the power 1/10.

use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::baselines::{run_baseline, BaselineConfig, BaselineKind};
use crate::error::{Error, Result};
use crate::eval::{OptimizationResult, TracePoint};
use crate::objectives::Benchmark;
use crate::optimizer::{optimize, OptimizerConfig, Variant};
use crate::sampling::KernelSpec;
use crate::scalar::Scalar;

/// Exponent applied to the cross-function mean.
pub const H_EXPONENT: f64 = 0.1;

/// Elementwise mean of equally long traces. Sums are compensated
/// (Neumaier), so cancelling repeats do not lose the small remainder.
pub fn average_runs<T: Scalar>(traces: &[Vec<T>]) -> Result<Vec<T>> {
    let first = traces.first().ok_or(Error::EmptyInput)?;
    let len = first.len();
    let mut sum = vec![(T::zero(), T::zero()); len];
    for trace in traces {
        if trace.len() != len {
            return Err(Error::Ragged {
                expected: len,
                found: trace.len(),
            });
        }
        for ((acc, carry), &v) in sum.iter_mut().zip(trace) {
            let t = *acc + v;
            *carry = *carry
                + if acc.abs() >= v.abs() {
                    (*acc - t) + v
                } else {
                    (v - t) + *acc
                };
            *acc = t;
        }
    }
    let r = T::lit(traces.len() as f64);
    Ok(sum.into_iter().map(|(s, c)| (s + c) / r).collect())
}

/// Min-max normalization to `[0, 1]`; a constant trace maps to zeros.
pub fn normalize_history<T: Scalar>(mean_trace: &[T]) -> Vec<T> {
    let (min, max) = mean_trace
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let range = max - min;
    // Negated so a NaN range also takes the degenerate branch.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(range > T::zero()) {
        return vec![T::zero(); mean_trace.len()];
    }
    mean_trace.iter().map(|&v| (v - min) / range).collect()
}

/// Min-max normalization of several traces of the same objective against
/// their common minimum and maximum, so the best trace ends at 0 and the
/// worst starts at 1. A set of identical constant traces maps to zeros.
pub fn normalize_jointly<T: Scalar>(mean_traces: &[Vec<T>]) -> Vec<Vec<T>> {
    let (min, max) = mean_traces
        .iter()
        .flatten()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let range = max - min;
    mean_traces
        .iter()
        .map(|trace| {
            if range > T::zero() {
                trace.iter().map(|&v| (v - min) / range).collect()
            } else {
                vec![T::zero(); trace.len()]
            }
        })
        .collect()
}

/// `h_i = (mean over functions of normalized_i)^(1/10)`.
pub fn aggregate_h<T: Scalar>(normalized: &[Vec<T>]) -> Result<Vec<T>> {
    let mean = average_runs(normalized)?;
    let exponent = T::lit(H_EXPONENT);
    Ok(mean
        .into_iter()
        .map(|m| m.max(T::zero()).powf(exponent))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateHistory<T> {
    pub per_function_mean: Vec<Vec<T>>,
    pub per_function_normalized: Vec<Vec<T>>,
    pub h: Vec<T>,
    pub h_min: T,
}

impl<T: Scalar> AggregateHistory<T> {
    /// Aggregate of a single optimizer, each objective normalized against
    /// its own trace. `runs[l]` holds the repeat traces of objective `l`.
    pub fn from_runs(runs: &[Vec<Vec<T>>]) -> Result<Self> {
        let per_function_mean = runs
            .iter()
            .map(|r| average_runs(r))
            .collect::<Result<Vec<_>>>()?;
        let per_function_normalized: Vec<Vec<T>> = per_function_mean
            .iter()
            .map(|m| normalize_history(m))
            .collect();
        Self::from_parts(per_function_mean, per_function_normalized)
    }

    /// Aggregates of several optimizers run on the same objectives, each
    /// objective normalized jointly over all optimizers' mean traces.
    /// `runs[o][l]` holds the repeat traces of optimizer `o` on objective `l`.
    pub fn compare(runs: &[Vec<Vec<Vec<T>>>]) -> Result<Vec<Self>> {
        let means = runs
            .iter()
            .map(|per_function| {
                per_function
                    .iter()
                    .map(|r| average_runs(r))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let functions = means.first().map_or(0, Vec::len);
        if let Some(bad) = means.iter().find(|m| m.len() != functions) {
            return Err(Error::Ragged {
                expected: functions,
                found: bad.len(),
            });
        }
        let mut normalized: Vec<Vec<Vec<T>>> = vec![Vec::with_capacity(functions); means.len()];
        for l in 0..functions {
            let column: Vec<Vec<T>> = means.iter().map(|m| m[l].clone()).collect();
            for (o, trace) in normalize_jointly(&column).into_iter().enumerate() {
                normalized[o].push(trace);
            }
        }
        means
            .into_iter()
            .zip(normalized)
            .map(|(mean, norm)| Self::from_parts(mean, norm))
            .collect()
    }

    fn from_parts(
        per_function_mean: Vec<Vec<T>>,
        per_function_normalized: Vec<Vec<T>>,
    ) -> Result<Self> {
        let h = aggregate_h(&per_function_normalized)?;
        let h_min = h.iter().copied().fold(T::infinity(), T::min);
        Ok(Self {
            per_function_mean,
            per_function_normalized,
            h,
            h_min,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OptimizerKind {
    ItsoShort,
    ItsoFull,
    Random,
    De,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 4] = [
        OptimizerKind::ItsoShort,
        OptimizerKind::ItsoFull,
        OptimizerKind::Random,
        OptimizerKind::De,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::ItsoShort => "itso-short",
            OptimizerKind::ItsoFull => "itso-full",
            OptimizerKind::Random => "random",
            OptimizerKind::De => "de",
        }
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownOptimizer(s.to_string()))
    }
}

/// An (optimizer x objective x repeat) experiment. Repeat `k` of every
/// cell is seeded with `base_seed + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunGrid<T> {
    pub optimizers: Vec<OptimizerKind>,
    pub objectives: Vec<Benchmark>,
    pub dimension: usize,
    pub repeats: usize,
    pub max_evaluations: usize,
    pub base_seed: u64,
    /// Overrides the default alpha of `itso-short`.
    pub alpha: Option<usize>,
    /// Overrides the default kernel of `itso-full`.
    pub kernel: Option<KernelSpec<T>>,
    /// Overrides every objective's default box.
    pub bounds: Option<(f64, f64)>,
}

impl<T: Scalar> RunGrid<T> {
    pub fn new(
        optimizers: Vec<OptimizerKind>,
        objectives: Vec<Benchmark>,
        dimension: usize,
        repeats: usize,
        max_evaluations: usize,
    ) -> Self {
        Self {
            optimizers,
            objectives,
            dimension,
            repeats,
            max_evaluations,
            base_seed: 0,
            alpha: None,
            kernel: None,
            bounds: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.optimizers.is_empty() || self.objectives.is_empty() {
            return Err(Error::InvalidConfig(
                "grid needs at least one optimizer and one objective".into(),
            ));
        }
        if self.repeats == 0 || self.dimension == 0 || self.max_evaluations == 0 {
            return Err(Error::InvalidConfig(
                "repeats, dimension and budget must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn bounds_for(&self, objective: Benchmark) -> (Vec<T>, Vec<T>) {
        let (lo, hi) = self
            .bounds
            .unwrap_or_else(|| objective.default_box(self.dimension));
        (
            vec![T::lit(lo); self.dimension],
            vec![T::lit(hi); self.dimension],
        )
    }

    /// Runs one cell of the grid.
    pub fn run_cell(
        &self,
        optimizer: OptimizerKind,
        objective: Benchmark,
        repeat: usize,
    ) -> Result<OptimizationResult<T>> {
        let seed = self.base_seed.wrapping_add(repeat as u64);
        let (lower, upper) = self.bounds_for(objective);
        let mut f = objective;
        match optimizer {
            OptimizerKind::ItsoShort | OptimizerKind::ItsoFull => {
                let variant = if optimizer == OptimizerKind::ItsoShort {
                    Variant::Short
                } else {
                    Variant::Full
                };
                let mut config = OptimizerConfig::new(lower, upper, self.max_evaluations, variant)
                    .with_seed(seed);
                if let Some(alpha) = self.alpha {
                    config.alpha = alpha;
                }
                if let Some(kernel) = self.kernel {
                    config.kernel = kernel;
                }
                optimize(&config, &mut f)
            }
            OptimizerKind::Random | OptimizerKind::De => {
                let kind = if optimizer == OptimizerKind::Random {
                    BaselineKind::RandomSearch
                } else {
                    BaselineKind::DeRand1Bin
                };
                let config =
                    BaselineConfig::new(kind, lower, upper, self.max_evaluations).with_seed(seed);
                run_baseline(&config, &mut f)
            }
        }
    }

    pub fn manifest(&self) -> String {
        let join = |items: Vec<&str>| items.join(",");
        let mut out = String::new();
        out.push_str(&format!(
            "optimizers = {}\n",
            join(self.optimizers.iter().map(|o| o.name()).collect())
        ));
        out.push_str(&format!(
            "objectives = {}\n",
            join(self.objectives.iter().map(|o| o.name()).collect())
        ));
        out.push_str(&format!("dimension = {}\n", self.dimension));
        out.push_str(&format!("max_evaluations = {}\n", self.max_evaluations));
        out.push_str(&format!("repeats = {}\n", self.repeats));
        out.push_str(&format!("base_seed = {}\n", self.base_seed));
        if let Some(alpha) = self.alpha {
            out.push_str(&format!("alpha = {alpha}\n"));
        }
        if let Some(kernel) = &self.kernel {
            out.push_str(&format!("kernel = {kernel:?}\n"));
        }
        if let Some((lo, hi)) = self.bounds {
            out.push_str(&format!("bounds = [{lo:?}, {hi:?}]\n"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellRun<T> {
    pub optimizer: OptimizerKind,
    pub objective: Benchmark,
    pub repeat: usize,
    pub result: OptimizationResult<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult<T> {
    pub runs: Vec<CellRun<T>>,
    /// One aggregate per optimizer, in grid order.
    pub aggregates: Vec<(OptimizerKind, AggregateHistory<T>)>,
}

impl<T: Scalar> GridResult<T> {
    pub fn aggregate(&self, optimizer: OptimizerKind) -> Option<&AggregateHistory<T>> {
        self.aggregates
            .iter()
            .find(|(k, _)| *k == optimizer)
            .map(|(_, a)| a)
    }

    pub fn runs_of(
        &self,
        optimizer: OptimizerKind,
        objective: Benchmark,
    ) -> impl Iterator<Item = &CellRun<T>> {
        self.runs
            .iter()
            .filter(move |c| c.optimizer == optimizer && c.objective == objective)
    }

    /// Median over repeats of the final best value.
    pub fn median_final(&self, optimizer: OptimizerKind, objective: Benchmark) -> Option<T> {
        let mut finals: Vec<T> = self
            .runs_of(optimizer, objective)
            .map(|c| c.result.best_value)
            .collect();
        if finals.is_empty() {
            return None;
        }
        finals.sort_by(|a, b| a.partial_cmp(b).expect("finite best values"));
        let m = finals.len();
        Some(if m % 2 == 1 {
            finals[m / 2]
        } else {
            (finals[m / 2 - 1] + finals[m / 2]) / T::lit(2.0)
        })
    }

    pub fn summary(&self) -> Vec<(OptimizerKind, T)> {
        self.aggregates.iter().map(|(k, a)| (*k, a.h_min)).collect()
    }

    /// Writes per-run traces, per-optimizer `h` curves, the summary table and
    /// the grid manifest into `dir`. Returns the paths written.
    pub fn write_artifacts(&self, grid: &RunGrid<T>, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for cell in &self.runs {
            let path = dir.join(format!(
                "{}__{}__run{}.csv",
                cell.optimizer, cell.objective, cell.repeat
            ));
            write_trace(&path, &cell.result.trace)?;
            written.push(path);
        }
        for (kind, aggregate) in &self.aggregates {
            let path = dir.join(format!("{kind}__h.csv"));
            let rows = aggregate
                .h
                .iter()
                .enumerate()
                .map(|(i, h)| (i + 1, h.as_f64()));
            write_series(&path, "evaluation,h", rows)?;
            written.push(path);
        }
        let summary = dir.join("summary.csv");
        let mut text = String::from("optimizer,h_min\n");
        for (kind, h_min) in self.summary() {
            text.push_str(&format!("{kind},{:?}\n", h_min.as_f64()));
        }
        fs::write(&summary, text)?;
        written.push(summary);
        let manifest = dir.join("manifest.txt");
        fs::write(&manifest, grid.manifest())?;
        written.push(manifest);
        Ok(written)
    }
}

/// Writes a best-so-far trace as CSV with header `evaluation,best_f`.
pub fn write_trace<T: Scalar>(path: &Path, trace: &[TracePoint<T>]) -> Result<()> {
    let rows = trace.iter().map(|p| (p.evaluation, p.best_value.as_f64()));
    write_series(path, "evaluation,best_f", rows)
}

fn write_series(path: &Path, header: &str, rows: impl Iterator<Item = (usize, f64)>) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    writeln!(out, "{header}")?;
    for (i, v) in rows {
        writeln!(out, "{i},{v:?}")?;
    }
    out.flush()?;
    Ok(())
}

/// Executes every cell (in parallel) and aggregates per optimizer, each
/// objective normalized jointly across the grid's optimizers.
///
/// A failing cell aborts the grid; the error names the first failing cell in
/// grid order.
pub fn run_grid<T: Scalar>(grid: &RunGrid<T>) -> Result<GridResult<T>> {
    grid.validate()?;
    let cells: Vec<(OptimizerKind, Benchmark, usize)> = grid
        .optimizers
        .iter()
        .flat_map(|&o| {
            grid.objectives
                .iter()
                .flat_map(move |&f| (0..grid.repeats).map(move |k| (o, f, k)))
        })
        .collect();

    let outcomes: Vec<Result<CellRun<T>>> = cells
        .par_iter()
        .map(|&(optimizer, objective, repeat)| {
            grid.run_cell(optimizer, objective, repeat)
                .map(|result| CellRun {
                    optimizer,
                    objective,
                    repeat,
                    result,
                })
                .map_err(|e| Error::Cell {
                    optimizer: optimizer.name().to_string(),
                    objective: objective.name().to_string(),
                    repeat,
                    source: Box::new(e),
                })
        })
        .collect();
    let runs = outcomes.into_iter().collect::<Result<Vec<_>>>()?;

    let per_optimizer: Vec<Vec<Vec<Vec<T>>>> = grid
        .optimizers
        .iter()
        .map(|&optimizer| {
            grid.objectives
                .iter()
                .map(|&objective| {
                    runs.iter()
                        .filter(|c| c.optimizer == optimizer && c.objective == objective)
                        .map(|c| c.result.best_values())
                        .collect()
                })
                .collect()
        })
        .collect();
    let aggregates = grid
        .optimizers
        .iter()
        .copied()
        .zip(AggregateHistory::compare(&per_optimizer)?)
        .collect();
    Ok(GridResult { runs, aggregates })
}

/// [`run_grid`] followed by [`GridResult::write_artifacts`].
pub fn run_grid_to_dir<T: Scalar>(grid: &RunGrid<T>, dir: &Path) -> Result<GridResult<T>> {
    let result = run_grid(grid)?;
    result.write_artifacts(grid, dir)?;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn average_examples() {
        assert_eq!(
            average_runs(&[vec![1.0, 1.0], vec![3.0, 3.0]]).unwrap(),
            vec![2.0, 2.0]
        );
        assert_eq!(average_runs(&[vec![4.0, 2.5]]).unwrap(), vec![4.0, 2.5]);
        assert!(matches!(
            average_runs(&[vec![1.0], vec![1.0, 2.0]]),
            Err(Error::Ragged {
                expected: 1,
                found: 2
            })
        ));
        assert!(matches!(average_runs::<f64>(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_history(&[10.0, 5.0, 0.0]), vec![1.0, 0.5, 0.0]);
        assert_eq!(normalize_history(&[4.0, 4.0, 4.0]), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn h_examples() {
        assert_eq!(aggregate_h(&[vec![1.0, 0.0]]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(
            aggregate_h(&[vec![0.0], vec![0.0], vec![0.0]]).unwrap(),
            vec![0.0]
        );
        assert!(aggregate_h(&[vec![0.0], vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn optimizer_names_round_trip() {
        for k in OptimizerKind::ALL {
            assert_eq!(k.name().parse::<OptimizerKind>().unwrap(), k);
        }
        assert!("cmaes".parse::<OptimizerKind>().is_err());
    }

    #[test]
    fn small_grid_cardinality() {
        let grid = RunGrid::<f64>::new(
            vec![OptimizerKind::ItsoShort, OptimizerKind::Random],
            vec![Benchmark::Sphere],
            3,
            2,
            200,
        );
        let result = run_grid(&grid).unwrap();
        assert_eq!(result.runs.len(), 4);
        assert_eq!(result.aggregates.len(), 2);
        for cell in &result.runs {
            assert_eq!(cell.result.trace.len(), 200);
        }
        for (_, agg) in &result.aggregates {
            assert_eq!(agg.h.len(), 200);
            assert_eq!(agg.h_min, *agg.h.last().unwrap());
        }
    }

    #[test]
    fn average_survives_cancellation() {
        let mean = average_runs(&[vec![1e16], vec![1.0], vec![-1e16]]).unwrap();
        assert_eq!(mean, vec![1.0 / 3.0]);
    }

    #[test]
    fn joint_normalization_separates_optimizers() {
        let better = vec![vec![10.0, 4.0, 0.0]];
        let worse = vec![vec![8.0, 6.0, 5.0]];
        let aggs = AggregateHistory::compare(&[vec![better.clone()], vec![worse]]).unwrap();
        assert_eq!(aggs[0].per_function_normalized[0], vec![1.0, 0.4, 0.0]);
        assert_eq!(aggs[1].per_function_normalized[0], vec![0.8, 0.6, 0.5]);
        assert_eq!(aggs[0].h_min, 0.0);
        assert!((aggs[1].h_min - 0.5f64.powf(0.1)).abs() < 1e-15);
        let alone = AggregateHistory::compare(&[vec![better.clone()]]).unwrap();
        assert_eq!(alone[0], AggregateHistory::from_runs(&[better]).unwrap());
        assert_eq!(
            normalize_jointly(&[vec![2.0, 2.0], vec![2.0]]),
            vec![vec![0.0, 0.0], vec![0.0]]
        );
    }

    #[test]
    fn failing_cell_is_identified() {
        let grid = RunGrid::<f64>::new(
            vec![OptimizerKind::ItsoShort],
            vec![Benchmark::Sphere],
            2,
            1,
            1,
        );
        match run_grid(&grid) {
            Err(Error::Cell {
                optimizer,
                objective,
                repeat,
                ..
            }) => {
                assert_eq!(
                    (optimizer.as_str(), objective.as_str(), repeat),
                    ("itso-short", "sphere", 0)
                );
            }
            other => panic!("expected cell error, got {other:?}"),
        }
    }

    #[test]
    fn manifest_lists_grid() {
        let mut grid = RunGrid::<f64>::new(
            vec![OptimizerKind::De],
            vec![Benchmark::X5, Benchmark::XJ],
            4,
            3,
            50,
        );
        grid.base_seed = 17;
        let m = grid.manifest();
        for line in [
            "optimizers = de",
            "objectives = x_5,x_j",
            "dimension = 4",
            "max_evaluations = 50",
            "repeats = 3",
            "base_seed = 17",
        ] {
            assert!(m.contains(line), "{m}");
        }
    }
}
