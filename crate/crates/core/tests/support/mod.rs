//! Independent oracles and property checks shared by the integration tests
//! and the acceptance runner.

#![allow(dead_code)]

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{ToPrimitive, Zero};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use itso::harness::{aggregate_h, average_runs, normalize_history, normalize_jointly};
use itso::objectives::CATALOG;
use itso::{
    build_cdf, build_marginal, optimize, run_baseline, BaselineConfig64, BaselineKind, Config64,
    Kernel64, Marginal64, Objective, Result64, Variant,
};

// ---------------------------------------------------------------------------
// Fixed marginals and the Kolmogorov-Smirnov statistic.

/// Triangular density on [0, 1] peaking at 0.5, tabulated on 1001 knots.
pub fn triangular_marginal() -> Marginal64 {
    let knots = 1001;
    let support: Vec<f64> = (0..knots).map(|k| k as f64 / (knots - 1) as f64).collect();
    let weights = support
        .iter()
        .map(|&x| 1.0 - (2.0 * x - 1.0).abs())
        .collect();
    Marginal64::from_weights(support, weights, (0.0, 1.0))
        .unwrap()
        .with_cdf()
        .unwrap()
}

pub fn triangular_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x <= 0.5 {
        2.0 * x * x
    } else if x < 1.0 {
        1.0 - 2.0 * (1.0 - x) * (1.0 - x)
    } else {
        1.0
    }
}

/// Uniform density on [0, 4] with knots at the integers.
pub fn uniform_marginal() -> Marginal64 {
    let support = (0..5).map(f64::from).collect();
    Marginal64::from_weights(support, vec![1.0; 5], (0.0, 4.0))
        .unwrap()
        .with_cdf()
        .unwrap()
}

pub fn uniform_cdf(x: f64) -> f64 {
    (x / 4.0).clamp(0.0, 1.0)
}

/// Two-sided KS statistic of `samples` against a continuous CDF.
pub fn ks_statistic(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// KS statistic of `count` inverse-transform samples from `marginal`.
pub fn inverse_transform_ks(
    marginal: &Marginal64,
    cdf: impl Fn(f64) -> f64,
    count: usize,
    seed: u64,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..count)
        .map(|_| marginal.quantile(rng.gen::<f64>()).unwrap())
        .collect();
    ks_statistic(samples, cdf)
}

// ---------------------------------------------------------------------------
// CDF oracle: dense trapezoid integration of the piecewise-linear density.

/// A random marginal: 2 to 60 strictly increasing knots, weights in [0, 1]
/// with roughly a fifth of them zero (but never all).
pub fn random_marginal(rng: &mut ChaCha8Rng) -> Marginal64 {
    let knots = rng.gen_range(2..=60);
    let lo = rng.gen_range(-100.0..100.0);
    let mut support = vec![lo];
    for _ in 1..knots {
        let step = 10f64.powf(rng.gen_range(-3.0..1.0));
        support.push(support.last().unwrap() + step);
    }
    let mut weights: Vec<f64> = (0..knots)
        .map(|_| {
            if rng.gen_bool(0.2) {
                0.0
            } else {
                rng.gen::<f64>()
            }
        })
        .collect();
    if weights.iter().all(|&w| w == 0.0) {
        weights[0] = 1.0;
    }
    let bounds = (support[0], support[knots - 1]);
    Marginal64::from_weights(support, weights, bounds).unwrap()
}

/// CDF at every knot by trapezoid integration of the linearly interpolated
/// density on a grid of about `points` nodes, knots included.
pub fn dense_trapezoid_cdf(support: &[f64], weights: &[f64], points: usize) -> Vec<f64> {
    let segments = support.len() - 1;
    let per_segment = (points / segments).max(1);
    let density = |x: f64| {
        let k = support.partition_point(|&s| s <= x).clamp(1, segments);
        let t = (x - support[k - 1]) / (support[k] - support[k - 1]);
        weights[k - 1] * (1.0 - t) + weights[k] * t
    };
    let mut cumulative = vec![0.0];
    let mut total = 0.0;
    for k in 0..segments {
        let (a, b) = (support[k], support[k + 1]);
        let h = (b - a) / per_segment as f64;
        let mut seg = 0.0;
        let mut left = weights[k];
        for i in 1..=per_segment {
            let right = if i == per_segment {
                weights[k + 1]
            } else {
                density(a + i as f64 * h)
            };
            seg += 0.5 * (left + right) * h;
            left = right;
        }
        total += seg;
        cumulative.push(total);
    }
    cumulative.iter().map(|c| c / total).collect()
}

/// Largest deviation between `build_cdf` and the dense oracle.
pub fn cdf_oracle_gap(marginal: Marginal64) -> f64 {
    let oracle = dense_trapezoid_cdf(marginal.support(), marginal.pdf_weights(), 100_000);
    let built = build_cdf(marginal).unwrap();
    built
        .cdf_values()
        .iter()
        .zip(&oracle)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Metric oracles in exact rational arithmetic.

fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite input")
}

fn rounded(v: &BigRational) -> f64 {
    v.to_f64().expect("representable")
}

pub fn exact_average_runs(traces: &[Vec<f64>]) -> Vec<f64> {
    let r = BigRational::from_integer(BigInt::from(traces.len()));
    (0..traces[0].len())
        .map(|i| {
            let sum = traces
                .iter()
                .fold(BigRational::zero(), |acc, t| acc + exact(t[i]));
            rounded(&(sum / &r))
        })
        .collect()
}

pub fn exact_normalize(trace: &[f64]) -> Vec<f64> {
    let min = trace.iter().copied().fold(f64::INFINITY, f64::min);
    let max = trace.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return vec![0.0; trace.len()];
    }
    let range = exact(max) - exact(min);
    trace
        .iter()
        .map(|&v| rounded(&((exact(v) - exact(min)) / &range)))
        .collect()
}

pub fn exact_aggregate_h(normalized: &[Vec<f64>]) -> Vec<f64> {
    let m = BigRational::from_integer(BigInt::from(normalized.len()));
    (0..normalized[0].len())
        .map(|i| {
            let sum = normalized
                .iter()
                .fold(BigRational::zero(), |acc, t| acc + exact(t[i]));
            rounded(&(sum / &m)).powf(0.1)
        })
        .collect()
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / y.abs().max(1.0))
        .fold(0.0, f64::max)
}

/// Random repeat traces: `repeats` runs of equal length, values spanning
/// several magnitudes.
pub fn random_traces(rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let repeats = rng.gen_range(1..=10);
    let len = rng.gen_range(1..=200);
    let scale = 10f64.powf(rng.gen_range(-6.0..6.0));
    (0..repeats)
        .map(|_| (0..len).map(|_| rng.gen_range(-1.0..1.0) * scale).collect())
        .collect()
}

/// Largest scaled gap (`|a - b| / max(1, |b|)`) between the library's
/// metric functions and the exact recomputation on one random input.
pub fn metric_oracle_gap(rng: &mut ChaCha8Rng) -> f64 {
    let traces = random_traces(rng);
    let mean = average_runs(&traces).unwrap();
    let mut gap = max_gap(&mean, &exact_average_runs(&traces));
    gap = gap.max(max_gap(&normalize_history(&mean), &exact_normalize(&mean)));

    let functions = rng.gen_range(1..=13);
    let len = rng.gen_range(1..=100);
    let normalized: Vec<Vec<f64>> = (0..functions)
        .map(|_| {
            (0..len)
                .map(|_| rng.gen::<f64>().powi(rng.gen_range(1..20)))
                .collect()
        })
        .collect();
    gap.max(max_gap(
        &aggregate_h(&normalized).unwrap(),
        &exact_aggregate_h(&normalized),
    ))
}

// ---------------------------------------------------------------------------
// Optimizer invariants over randomized configurations.

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Short,
    Full,
    Random,
    De,
}

#[derive(Debug, Clone)]
pub struct RunCase {
    pub method: Method,
    pub dimension: usize,
    pub budget: usize,
    pub lower: f64,
    pub width: f64,
    pub seed: u64,
    pub objective: usize,
}

pub fn run_case() -> impl Strategy<Value = RunCase> {
    (
        prop_oneof![
            Just(Method::Short),
            Just(Method::Full),
            Just(Method::Random),
            Just(Method::De)
        ],
        1usize..=4,
        2usize..=150,
        -50.0f64..50.0,
        0.1f64..100.0,
        any::<u64>(),
        0usize..CATALOG.len(),
    )
        .prop_map(
            |(method, dimension, budget, lower, width, seed, objective)| RunCase {
                method,
                dimension,
                budget,
                lower,
                width,
                seed,
                objective,
            },
        )
}

/// Every point submitted to the objective, with its value.
pub struct Recorder<'a> {
    pub objective: &'a dyn Fn(&[f64]) -> f64,
    pub log: Vec<(Vec<f64>, f64)>,
}

impl Objective<f64> for Recorder<'_> {
    fn evaluate(&mut self, x: &[f64]) -> itso::Result<f64> {
        let v = (self.objective)(x);
        self.log.push((x.to_vec(), v));
        Ok(v)
    }
}

pub fn execute(case: &RunCase) -> (Result64, Vec<(Vec<f64>, f64)>) {
    let bench = CATALOG[case.objective];
    let f = move |x: &[f64]| bench.evaluate(x);
    let mut recorder = Recorder {
        objective: &f,
        log: Vec::new(),
    };
    let (n, lo, hi) = (case.dimension, case.lower, case.lower + case.width);
    let result = match case.method {
        Method::Short | Method::Full => {
            let variant = if case.method == Method::Short {
                Variant::Short
            } else {
                Variant::Full
            };
            let config = Config64::cube(n, lo, hi, case.budget, variant).with_seed(case.seed);
            optimize(&config, &mut recorder).unwrap()
        }
        Method::Random | Method::De => {
            let kind = if case.method == Method::Random {
                BaselineKind::RandomSearch
            } else {
                BaselineKind::DeRand1Bin
            };
            let config = BaselineConfig64::cube(kind, n, lo, hi, case.budget).with_seed(case.seed);
            run_baseline(&config, &mut recorder).unwrap()
        }
    };
    (result, recorder.log)
}

pub fn check_budget_exactness(case: &RunCase) -> Result<(), TestCaseError> {
    let (result, log) = execute(case);
    prop_assert_eq!(log.len(), case.budget);
    prop_assert_eq!(result.evaluations_used, case.budget);
    prop_assert_eq!(result.trace.len(), case.budget);
    for (k, p) in result.trace.iter().enumerate() {
        prop_assert_eq!(p.evaluation, k + 1);
    }
    Ok(())
}

pub fn check_monotone_incumbent(case: &RunCase) -> Result<(), TestCaseError> {
    let (result, log) = execute(case);
    let mut best = f64::INFINITY;
    for (p, (_, v)) in result.trace.iter().zip(&log) {
        best = best.min(*v);
        prop_assert_eq!(p.best_value, best);
    }
    prop_assert_eq!(result.best_value, best);
    let bench = CATALOG[case.objective];
    prop_assert_eq!(bench.evaluate(&result.best_point), result.best_value);
    Ok(())
}

pub fn check_box_containment(case: &RunCase) -> Result<(), TestCaseError> {
    let (result, log) = execute(case);
    let (lo, hi) = (case.lower, case.lower + case.width);
    for (x, _) in log
        .iter()
        .chain(std::iter::once(&(result.best_point.clone(), 0.0)))
    {
        prop_assert_eq!(x.len(), case.dimension);
        prop_assert!(
            x.iter().all(|&v| lo <= v && v <= hi),
            "{:?} outside [{}, {}]",
            x,
            lo,
            hi
        );
    }
    Ok(())
}

pub fn check_seed_determinism(case: &RunCase) -> Result<(), TestCaseError> {
    let (first, first_log) = execute(case);
    let (second, second_log) = execute(case);
    prop_assert_eq!(first, second);
    prop_assert_eq!(first_log, second_log);
    Ok(())
}

/// Random history for marginal construction. Objective values are drawn
/// from a small set half of the time to exercise duplicate removal.
#[derive(Debug, Clone)]
pub struct HistoryCase {
    pub points: Vec<(Vec<f64>, f64)>,
    pub kernel: Kernel64,
    pub iteration: usize,
}

pub fn history_case() -> impl Strategy<Value = HistoryCase> {
    let kernel = prop_oneof![
        (1e-3f64..1e3).prop_map(|g| Kernel64::gaussian(g).unwrap()),
        Just(Kernel64::MaxShift),
        (1e-9f64..1e-3).prop_map(|e| Kernel64::normalized(e).unwrap()),
    ];
    (
        1usize..=3,
        2usize..=80,
        any::<bool>(),
        kernel,
        0usize..10_000,
    )
        .prop_flat_map(|(dim, len, coarse, kernel, iteration)| {
            let value = if coarse {
                (0u8..4).prop_map(f64::from).boxed()
            } else {
                (-1e3f64..1e3).boxed()
            };
            proptest::collection::vec((proptest::collection::vec(-10.0f64..10.0, dim), value), len)
                .prop_map(move |points| HistoryCase {
                    points,
                    kernel,
                    iteration,
                })
        })
}

pub fn check_cdf_monotonicity(case: &HistoryCase) -> Result<(), TestCaseError> {
    let dim = case.points[0].0.len();
    let mut history = itso::History64::new(dim).unwrap();
    for (x, f) in &case.points {
        history.push(x, *f).unwrap();
    }
    let distinct = {
        let mut v: Vec<f64> = case.points.iter().map(|p| p.1).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v.len()
    };
    for j in 0..dim {
        match build_marginal(&history, j, &case.kernel, (-10.0, 10.0), case.iteration)
            .and_then(build_cdf)
        {
            Ok(m) => {
                let cdf = m.cdf_values();
                prop_assert_eq!(cdf[0], 0.0);
                prop_assert!((cdf[cdf.len() - 1] - 1.0).abs() <= 1e-12);
                prop_assert!(cdf.windows(2).all(|w| w[0] <= w[1]), "cdf {:?}", cdf);
                let sum: f64 = m.pdf_weights().iter().sum();
                prop_assert!((sum - 1.0).abs() <= 1e-12);
                let mut previous = f64::NEG_INFINITY;
                for i in 0..=1000 {
                    let x = m.quantile(i as f64 / 1000.0).unwrap();
                    prop_assert!(x >= previous);
                    previous = x;
                }
            }
            Err(e) => prop_assert!(
                distinct < 2 || matches!(e, itso::Error::InsufficientSupport),
                "{e}"
            ),
        }
    }
    Ok(())
}

/// Non-constant trace with an affine map `a * v + b`, `a > 0`.
pub fn affine_case() -> impl Strategy<Value = (Vec<f64>, f64, f64)> {
    (
        proptest::collection::vec(-1e3f64..1e3, 2..100)
            .prop_filter("non-constant", |v| v.iter().any(|&x| x != v[0])),
        1e-3f64..1e3,
        -1e3f64..1e3,
    )
}

pub fn check_affine_invariance((trace, a, b): &(Vec<f64>, f64, f64)) -> Result<(), TestCaseError> {
    let mapped: Vec<f64> = trace.iter().map(|&v| a * v + b).collect();
    let base = normalize_history(trace);
    let moved = normalize_history(&mapped);
    for (x, y) in base.iter().zip(&moved) {
        prop_assert!((x - y).abs() <= 1e-12, "{} vs {}", x, y);
    }
    let half = trace.len() / 2;
    let joint = normalize_jointly(&[trace[..half].to_vec(), trace[half..].to_vec()]);
    let joint_moved = normalize_jointly(&[mapped[..half].to_vec(), mapped[half..].to_vec()]);
    for (x, y) in joint.iter().flatten().zip(joint_moved.iter().flatten()) {
        prop_assert!((x - y).abs() <= 1e-12, "{} vs {}", x, y);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Helpers for 1-D runs of the full variant.

/// `(q05, q95)` of the full variant's marginal after `prefix` evaluations.
pub fn steep_rise_window(
    config: &Config64,
    history: &itso::History64,
    prefix: usize,
) -> (f64, f64) {
    let m = itso::optimizer::full_marginal(config, &history.prefix(prefix), 0).unwrap();
    (m.quantile(0.05).unwrap(), m.quantile(0.95).unwrap())
}
