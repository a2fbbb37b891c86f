use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Base value `e_0` of the normalized kernel's vanishing offset `e_i = e_0 / (i + 1)`.
pub const DEFAULT_EPSILON0: f64 = 1e-6;

/// Order-reversing map from objective values to unnormalized probability mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec<T> {
    /// `exp(-g(i) * s^2)` where `s = (f - min f) / (max f - min f)` and
    /// `g(i) = growth * i^power`.
    Gaussian { growth: T, power: T },
    /// `max f - f`.
    MaxShift,
    /// `1 - (f - min f + e_i) / (max f - min f + e_i)` with `e_i = epsilon0 / (i + 1)`.
    Normalized { epsilon0: T },
}

impl<T: Scalar> KernelSpec<T> {
    /// Gaussian kernel with the linear schedule `g(i) = growth * i`.
    pub fn gaussian(growth: T) -> Result<Self> {
        Self::gaussian_with_power(growth, T::one())
    }

    pub fn gaussian_with_power(growth: T, power: T) -> Result<Self> {
        let spec = KernelSpec::Gaussian { growth, power };
        spec.validate()?;
        Ok(spec)
    }

    /// Gaussian kernel whose `g(i) = final_sharpness * (i / budget)^power`
    /// reaches `final_sharpness` at the last evaluation.
    pub fn gaussian_schedule(final_sharpness: T, budget: usize, power: T) -> Result<Self> {
        let growth = final_sharpness / T::lit(budget.max(1) as f64).powf(power);
        Self::gaussian_with_power(growth, power)
    }

    pub fn normalized(epsilon0: T) -> Result<Self> {
        let spec = KernelSpec::Normalized { epsilon0 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::Gaussian { .. } => "gaussian",
            KernelSpec::MaxShift => "maxshift",
            KernelSpec::Normalized { .. } => "normalized",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Gaussian { growth, .. } if !(growth > T::zero() && growth.is_finite()) => {
                Err(Error::InvalidConfig(format!(
                    "gaussian growth must be positive, got {growth}"
                )))
            }
            KernelSpec::Gaussian { power, .. } if !(power > T::zero() && power.is_finite()) => Err(
                Error::InvalidConfig(format!("gaussian power must be positive, got {power}")),
            ),
            KernelSpec::Normalized { epsilon0 }
                if !(epsilon0 > T::zero() && epsilon0.is_finite()) =>
            {
                Err(Error::InvalidConfig(format!(
                    "epsilon0 must be positive, got {epsilon0}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Sharpening schedule `g(i)` of the gaussian kernel; zero for the others.
    pub fn growth_at(&self, iteration: usize) -> T {
        match *self {
            KernelSpec::Gaussian { growth, power } => growth * T::lit(iteration as f64).powf(power),
            _ => T::zero(),
        }
    }

    /// Offset `e_i` of the normalized kernel; zero for the others.
    pub fn epsilon_at(&self, iteration: usize) -> T {
        match *self {
            KernelSpec::Normalized { epsilon0 } => epsilon0 / T::lit(iteration as f64 + 1.0),
            _ => T::zero(),
        }
    }
}

/// Applies `spec` to every value at time step `iteration`.
///
/// When all values coincide there is nothing to order and every kernel
/// returns uniform unit weights.
pub fn kernel_apply<T: Scalar>(
    spec: &KernelSpec<T>,
    values: &[T],
    iteration: usize,
) -> Result<Vec<T>> {
    if values.is_empty() {
        return Err(Error::EmptyHistory);
    }
    let mut min = T::infinity();
    let mut max = T::neg_infinity();
    for &v in values {
        if !v.is_finite() {
            return Err(Error::NonFiniteObjective);
        }
        min = min.min(v);
        max = max.max(v);
    }
    let range = max - min;
    if range == T::zero() {
        return Ok(vec![T::one(); values.len()]);
    }

    let weights = match *spec {
        KernelSpec::Gaussian { .. } => {
            let g = spec.growth_at(iteration);
            values
                .iter()
                .map(|&v| {
                    let s = (v - min) / range;
                    (-(s * s) * g).exp()
                })
                .collect()
        }
        KernelSpec::MaxShift => values.iter().map(|&v| max - v).collect(),
        KernelSpec::Normalized { .. } => {
            let e = spec.epsilon_at(iteration);
            let denom = range + e;
            values
                .iter()
                .map(|&v| (T::one() - (v - min + e) / denom).max(T::zero()))
                .collect()
        }
    };
    Ok(weights)
}
