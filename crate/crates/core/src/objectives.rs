//! Benchmark suite of thirteen box-bounded test functions.
//!
//! Several definitions differ from the textbook versions of the same name
//! (shifted optima, rastrigin's squared cosine argument, a zero leading
//! elliptic weight, absolute-value cigar terms). They are implemented
//! exactly as listed here, not as the canonical suites define them.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::eval::Objective;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Benchmark {
    /// `sum c_j (x_j + 1.5)^2`, `c = 1000 * {0, 1/(n-1), ..., 1}`.
    Elliptic,
    /// `x_1^2 + sum_{j>=2} |x_j|`.
    Cigar,
    /// `x_1^2 + sum_{j=2}^{n-1} |x_j| + x_n^2`.
    Cigtab,
    /// `1 + sum x_j^2 / 4000 - prod cos(x_j / sqrt(j))`.
    Griewank,
    /// `sum j (x_j - 2)^4`.
    Quartic,
    /// `sum c_j^2` with the running sum `c_j = sum_{k<=j} (x_k - 9)`.
    Schwefel,
    /// `10n + sum y_j^2 - 10 sum cos(2 pi y_j^2)`, `y = x + 0.7`.
    Rastrigin,
    /// `sum (x_j - 1.3)^2`.
    Sphere,
    /// `sum (x_j - sqrt 2)^2`.
    Ellipsoid,
    /// `sum |x_j sin x_j + 0.1 x_j|`.
    Alpine,
    /// `sum (x_j - j - 2.1)^2`.
    XJ,
    /// `sum (x_j - 5)^2 - 5`.
    X5,
    /// `sum sin(y_j) + y_j^2 / 100`, `y = x + 0.7`.
    SinX,
}

/// All benchmarks in catalog order.
pub const CATALOG: [Benchmark; 13] = [
    Benchmark::Elliptic,
    Benchmark::Cigar,
    Benchmark::Cigtab,
    Benchmark::Griewank,
    Benchmark::Quartic,
    Benchmark::Schwefel,
    Benchmark::Rastrigin,
    Benchmark::Sphere,
    Benchmark::Ellipsoid,
    Benchmark::Alpine,
    Benchmark::XJ,
    Benchmark::X5,
    Benchmark::SinX,
];

pub fn names() -> Vec<&'static str> {
    CATALOG.iter().map(|b| b.name()).collect()
}

impl Benchmark {
    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Elliptic => "elliptic",
            Benchmark::Cigar => "cigar",
            Benchmark::Cigtab => "cigtab",
            Benchmark::Griewank => "griewank",
            Benchmark::Quartic => "quartic",
            Benchmark::Schwefel => "schwefel",
            Benchmark::Rastrigin => "rastrigin",
            Benchmark::Sphere => "sphere",
            Benchmark::Ellipsoid => "ellipsoid",
            Benchmark::Alpine => "alpine",
            Benchmark::XJ => "x_j",
            Benchmark::X5 => "x_5",
            Benchmark::SinX => "sin_x",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        CATALOG
            .iter()
            .copied()
            .find(|b| b.name() == name)
            .ok_or_else(|| Error::UnknownObjective {
                name: name.to_string(),
                valid: names(),
            })
    }

    /// Value at `x`; defined for any nonempty `x`.
    pub fn evaluate<T: Scalar>(self, x: &[T]) -> T {
        let n = x.len();
        let c = T::lit;
        let sum = |f: &dyn Fn(usize, T) -> T| -> T {
            x.iter().enumerate().map(|(k, &v)| f(k + 1, v)).sum()
        };
        match self {
            Benchmark::Elliptic => sum(&|j, v| {
                let weight = if n > 1 {
                    1e3 * (j - 1) as f64 / (n - 1) as f64
                } else {
                    0.0
                };
                c(weight) * (v + c(1.5)).powi(2)
            }),
            Benchmark::Cigar => x[0] * x[0] + x[1..].iter().map(|v| v.abs()).sum::<T>(),
            Benchmark::Cigtab => {
                let middle: T = if n > 2 {
                    x[1..n - 1].iter().map(|v| v.abs()).sum()
                } else {
                    T::zero()
                };
                x[0] * x[0] + middle + x[n - 1] * x[n - 1]
            }
            Benchmark::Griewank => {
                let quad = sum(&|_, v| v * v) / c(4000.0);
                let prod = x.iter().enumerate().fold(T::one(), |acc, (k, &v)| {
                    acc * (v / c(((k + 1) as f64).sqrt())).cos()
                });
                T::one() + quad - prod
            }
            Benchmark::Quartic => sum(&|j, v| c(j as f64) * (v - c(2.0)).powi(4)),
            Benchmark::Schwefel => {
                let mut running = T::zero();
                x.iter()
                    .map(|&v| {
                        running = running + (v - c(9.0));
                        running * running
                    })
                    .sum()
            }
            Benchmark::Rastrigin => {
                let two_pi = c(2.0 * PI);
                c(10.0 * n as f64)
                    + sum(&|_, v| {
                        let y2 = (v + c(0.7)).powi(2);
                        y2 - c(10.0) * (two_pi * y2).cos()
                    })
            }
            Benchmark::Sphere => sum(&|_, v| (v - c(1.3)).powi(2)),
            Benchmark::Ellipsoid => sum(&|_, v| (v - c(SQRT_2)).powi(2)),
            Benchmark::Alpine => sum(&|_, v| (v * v.sin() + c(0.1) * v).abs()),
            Benchmark::XJ => sum(&|j, v| (v - c(j as f64) - c(2.1)).powi(2)),
            Benchmark::X5 => sum(&|_, v| (v - c(5.0)).powi(2)) - c(5.0),
            Benchmark::SinX => sum(&|_, v| {
                let y = v + c(0.7);
                y.sin() + y * y / c(100.0)
            }),
        }
    }

    /// Search box used by the benchmark harness: `[-15, 15]` per coordinate,
    /// `[-15, n + 15]` for `x_j` so its optimum stays interior.
    pub fn default_box(self, dimension: usize) -> (f64, f64) {
        match self {
            Benchmark::XJ => (-15.0, dimension as f64 + 15.0),
            _ => (-15.0, 15.0),
        }
    }

    pub fn known_minimum(self, dimension: usize) -> Option<KnownMinimum> {
        let uniform = |v: f64, value: f64, description: &'static str| KnownMinimum {
            point: vec![v; dimension],
            value,
            description,
        };
        Some(match self {
            Benchmark::Elliptic => uniform(-1.5, 0.0, "x_j = -1.5 (x_1 is free)"),
            Benchmark::Cigar => uniform(0.0, 0.0, "x = 0"),
            Benchmark::Cigtab => uniform(0.0, 0.0, "x = 0"),
            Benchmark::Griewank => uniform(0.0, 0.0, "x = 0"),
            Benchmark::Quartic => uniform(2.0, 0.0, "x_j = 2"),
            Benchmark::Schwefel => uniform(9.0, 0.0, "x_j = 9"),
            Benchmark::Rastrigin => uniform(-0.7, 0.0, "x_j = -0.7"),
            Benchmark::Sphere => uniform(1.3, 0.0, "x_j = 1.3"),
            Benchmark::Ellipsoid => uniform(SQRT_2, 0.0, "x_j = sqrt(2)"),
            Benchmark::Alpine => uniform(0.0, 0.0, "x = 0"),
            Benchmark::XJ => KnownMinimum {
                point: (1..=dimension).map(|j| j as f64 + 2.1).collect(),
                value: 0.0,
                description: "x_j = j + 2.1",
            },
            Benchmark::X5 => uniform(5.0, -5.0, "x_j = 5"),
            Benchmark::SinX => return None,
        })
    }

    pub fn spec(self, dimension: usize) -> ObjectiveSpec {
        ObjectiveSpec {
            benchmark: self,
            dimension,
            default_box: self.default_box(dimension),
            known_minimum: self.known_minimum(dimension),
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Benchmark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Benchmark::from_name(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnownMinimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub description: &'static str,
}

/// A benchmark fixed to one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveSpec {
    pub benchmark: Benchmark,
    pub dimension: usize,
    /// `(lb, ub)` applied to every coordinate.
    pub default_box: (f64, f64),
    pub known_minimum: Option<KnownMinimum>,
}

impl ObjectiveSpec {
    pub fn name(&self) -> &'static str {
        self.benchmark.name()
    }

    pub fn evaluate<T: Scalar>(&self, x: &[T]) -> Result<T> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: x.len(),
            });
        }
        Ok(self.benchmark.evaluate(x))
    }

    pub fn bounds<T: Scalar>(&self) -> (Vec<T>, Vec<T>) {
        let (lo, hi) = self.default_box;
        (
            vec![T::lit(lo); self.dimension],
            vec![T::lit(hi); self.dimension],
        )
    }

    pub fn midpoint<T: Scalar>(&self) -> Vec<T> {
        let (lo, hi) = self.default_box;
        vec![T::lit(0.5 * (lo + hi)); self.dimension]
    }
}

impl<T: Scalar> Objective<T> for ObjectiveSpec {
    fn evaluate(&mut self, x: &[T]) -> Result<T> {
        ObjectiveSpec::evaluate(self, x)
    }
}

impl<T: Scalar> Objective<T> for Benchmark {
    fn evaluate(&mut self, x: &[T]) -> Result<T> {
        if x.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        Ok(Benchmark::evaluate(*self, x))
    }
}

/// Evaluates the benchmark called `name` at `x`.
pub fn evaluate<T: Scalar>(name: &str, x: &[T]) -> Result<T> {
    let mut benchmark = Benchmark::from_name(name)?;
    Objective::evaluate(&mut benchmark, x)
}

/// Specs of all thirteen benchmarks in catalog order.
pub fn list_objectives(dimension: usize) -> Vec<ObjectiveSpec> {
    CATALOG.iter().map(|b| b.spec(dimension)).collect()
}
