use std::cmp::Ordering;

use super::history::EvaluationHistory;
use super::kernel::{kernel_apply, KernelSpec};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Objective values closer than this are treated as duplicates.
pub const DUPLICATE_TOLERANCE: f64 = 1e-12;

/// Piecewise-linear distribution of one coordinate.
///
/// `pdf_weights` are the normalized kernel masses at the support points; the
/// density between two support points is their linear interpolant, and the
/// CDF is its trapezoid integral, anchored at 0 on the first support point.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMarginal<T> {
    support: Vec<T>,
    pdf_weights: Vec<T>,
    cdf_values: Vec<T>,
    area: T,
    lower_bound: T,
    upper_bound: T,
}

impl<T: Scalar> EmpiricalMarginal<T> {
    /// Builds a marginal from explicit weights. The support must be strictly
    /// increasing and lie inside `bounds`; weights are normalized to sum 1.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn from_weights(support: Vec<T>, weights: Vec<T>, bounds: (T, T)) -> Result<Self> {
        if support.len() != weights.len() {
            return Err(Error::InvalidMarginal(format!(
                "{} support points but {} weights",
                support.len(),
                weights.len()
            )));
        }
        if support.len() < 2 {
            return Err(Error::InsufficientSupport);
        }
        if support.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidMarginal(
                "support must be strictly increasing".into(),
            ));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= T::zero())) {
            return Err(Error::InvalidMarginal(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let (lower_bound, upper_bound) = bounds;
        if !(lower_bound <= support[0] && support[support.len() - 1] <= upper_bound) {
            return Err(Error::InvalidMarginal(
                "support lies outside the bounds".into(),
            ));
        }
        Ok(Self {
            pdf_weights: normalize_weights(weights),
            support,
            cdf_values: Vec::new(),
            area: T::zero(),
            lower_bound,
            upper_bound,
        })
    }

    pub fn support(&self) -> &[T] {
        &self.support
    }

    pub fn pdf_weights(&self) -> &[T] {
        &self.pdf_weights
    }

    /// Empty until [`build_cdf`] has run.
    pub fn cdf_values(&self) -> &[T] {
        &self.cdf_values
    }

    pub fn has_cdf(&self) -> bool {
        !self.cdf_values.is_empty()
    }

    pub fn bounds(&self) -> (T, T) {
        (self.lower_bound, self.upper_bound)
    }

    /// Populates the CDF. See [`build_cdf`].
    pub fn with_cdf(self) -> Result<Self> {
        build_cdf(self)
    }

    /// Piecewise-linear interpolant of `(support, cdf_values)`, clamped to
    /// 0 below the support and 1 above it.
    pub fn cdf_at(&self, x: T) -> Result<T> {
        let cdf = self.cdf()?;
        let s = &self.support;
        if x <= s[0] {
            return Ok(T::zero());
        }
        if x >= s[s.len() - 1] {
            return Ok(T::one());
        }
        let k = s.partition_point(|&v| v <= x);
        let t = (x - s[k - 1]) / (s[k] - s[k - 1]);
        Ok(cdf[k - 1] + t * (cdf[k] - cdf[k - 1]))
    }

    /// Probability density at `x`: the interpolated weights scaled so the
    /// density integrates to one over the support.
    pub fn density_at(&self, x: T) -> Result<T> {
        self.cdf()?;
        let s = &self.support;
        if x < s[0] || x > s[s.len() - 1] {
            return Ok(T::zero());
        }
        let k = s.partition_point(|&v| v < x).max(1);
        let w = &self.pdf_weights;
        let t = (x - s[k - 1]) / (s[k] - s[k - 1]);
        Ok((w[k - 1] + t * (w[k] - w[k - 1])) / self.area)
    }

    /// Inverse CDF. See [`inverse_cdf_sample`].
    pub fn quantile(&self, r: T) -> Result<T> {
        inverse_cdf_sample(self, r)
    }

    /// Width of the interval between the `lo` and `hi` quantiles.
    pub fn interquantile_width(&self, lo: T, hi: T) -> Result<T> {
        Ok(self.quantile(hi)? - self.quantile(lo)?)
    }

    fn cdf(&self) -> Result<&[T]> {
        if self.cdf_values.is_empty() {
            Err(Error::CdfNotBuilt)
        } else {
            Ok(&self.cdf_values)
        }
    }
}

fn normalize_weights<T: Scalar>(weights: Vec<T>) -> Vec<T> {
    let total: T = weights.iter().copied().sum();
    if total > T::zero() && total.is_finite() {
        weights.into_iter().map(|w| w / total).collect()
    } else {
        let u = T::one() / T::lit(weights.len() as f64);
        vec![u; weights.len()]
    }
}

/// Indices of the history entries that survive duplicate-value removal, in
/// history order. Values within [`DUPLICATE_TOLERANCE`] of their sorted
/// predecessor form one group, represented by its earliest entry.
fn distinct_value_indices<T: Scalar>(values: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    let tol = T::lit(DUPLICATE_TOLERANCE);
    let mut kept = Vec::with_capacity(values.len());
    let mut group_min = match order.first() {
        Some(&i) => i,
        None => return kept,
    };
    for pair in order.windows(2) {
        let (prev, cur) = (pair[0], pair[1]);
        if (values[cur] - values[prev]).abs() <= tol {
            group_min = group_min.min(cur);
        } else {
            kept.push(group_min);
            group_min = cur;
        }
    }
    kept.push(group_min);
    kept.sort_unstable();
    kept
}

/// Marginal distribution of coordinate `dim` (0-based) given the history.
///
/// Entries whose objective value duplicates an earlier one are dropped, the
/// kernel is applied to the remaining values, and entries sharing a
/// coordinate are merged into one support point carrying the largest weight.
/// The returned marginal has no CDF yet.
pub fn build_marginal<T: Scalar>(
    history: &EvaluationHistory<T>,
    dim: usize,
    spec: &KernelSpec<T>,
    bounds: (T, T),
    iteration: usize,
) -> Result<EmpiricalMarginal<T>> {
    if dim >= history.dimension() {
        return Err(Error::DimensionOutOfRange {
            index: dim,
            dimension: history.dimension(),
        });
    }
    let kept = distinct_value_indices(history.values());
    if kept.len() < 2 {
        return Err(Error::InsufficientHistory);
    }
    let values: Vec<T> = kept.iter().map(|&i| history.values()[i]).collect();
    let weights = kernel_apply(spec, &values, iteration)?;

    let mut pairs: Vec<(T, T)> = kept
        .iter()
        .zip(weights)
        .map(|(&i, w)| (history.coordinate(i, dim), w))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));

    let mut support: Vec<T> = Vec::with_capacity(pairs.len());
    let mut raw: Vec<T> = Vec::with_capacity(pairs.len());
    for (x, w) in pairs {
        match support.last() {
            Some(&last) if last == x => {
                let top = raw.last_mut().expect("weights track support");
                *top = top.max(w);
            }
            _ => {
                support.push(x);
                raw.push(w);
            }
        }
    }
    if support.len() < 2 {
        return Err(Error::InsufficientSupport);
    }
    EmpiricalMarginal::from_weights(support, raw, bounds)
}

/// Trapezoid-rule CDF of the piecewise-linear density through the weights.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn build_cdf<T: Scalar>(mut marginal: EmpiricalMarginal<T>) -> Result<EmpiricalMarginal<T>> {
    let s = &marginal.support;
    let w = &marginal.pdf_weights;
    if s.len() < 2 {
        return Err(Error::InsufficientSupport);
    }
    let half = T::lit(0.5);
    let mut cdf = Vec::with_capacity(s.len());
    cdf.push(T::zero());
    let mut acc = T::zero();
    for k in 1..s.len() {
        acc = acc + (w[k] + w[k - 1]) * half * (s[k] - s[k - 1]);
        cdf.push(acc);
    }
    if !(acc > T::zero()) {
        return Err(Error::InvalidMarginal("zero total mass".into()));
    }
    for c in cdf.iter_mut() {
        *c = *c / acc;
    }
    let last = cdf.len() - 1;
    cdf[last] = T::one();
    marginal.area = acc;
    marginal.cdf_values = cdf;
    Ok(marginal)
}

/// Returns the coordinate at which the piecewise-linear CDF reaches `r`.
///
/// On a flat stretch of the CDF the left end of the stretch is returned;
/// `r = 1` maps to the last support point.
pub fn inverse_cdf_sample<T: Scalar>(marginal: &EmpiricalMarginal<T>, r: T) -> Result<T> {
    if !(r >= T::zero() && r <= T::one()) {
        return Err(Error::ProbabilityOutOfRange(r.as_f64()));
    }
    let cdf = marginal.cdf()?;
    let s = &marginal.support;
    let last = s.len() - 1;
    if r == T::one() {
        return Ok(s[last]);
    }
    let k = cdf.partition_point(|&c| c < r);
    if k == 0 {
        return Ok(s[0]);
    }
    let (c0, c1) = (cdf[k - 1], cdf[k]);
    let t = (r - c0) / (c1 - c0);
    let x = s[k - 1] + t * (s[k] - s[k - 1]);
    Ok(x.max(s[k - 1]).min(s[k]))
}
