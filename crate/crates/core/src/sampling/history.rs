use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Append-only record of evaluated points and their objective values.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationHistory<T> {
    dimension: usize,
    coords: Vec<T>,
    values: Vec<T>,
}

impl<T: Scalar> EvaluationHistory<T> {
    pub fn new(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidConfig(
                "history dimension must be positive".into(),
            ));
        }
        Ok(Self {
            dimension,
            coords: Vec::new(),
            values: Vec::new(),
        })
    }

    pub fn with_capacity(dimension: usize, capacity: usize) -> Result<Self> {
        let mut history = Self::new(dimension)?;
        history.coords.reserve(capacity * dimension);
        history.values.reserve(capacity);
        Ok(history)
    }

    pub fn push(&mut self, point: &[T], value: T) -> Result<()> {
        if point.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: point.len(),
            });
        }
        self.coords.extend_from_slice(point);
        self.values.push(value);
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn point(&self, index: usize) -> &[T] {
        &self.coords[index * self.dimension..(index + 1) * self.dimension]
    }

    #[inline]
    pub fn coordinate(&self, index: usize, dim: usize) -> T {
        self.coords[index * self.dimension + dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.coords.chunks_exact(self.dimension)
    }

    /// Copy of the first `len` entries, i.e. the history as it stood after
    /// `len` evaluations.
    pub fn prefix(&self, len: usize) -> Self {
        let len = len.min(self.len());
        Self {
            dimension: self.dimension,
            coords: self.coords[..len * self.dimension].to_vec(),
            values: self.values[..len].to_vec(),
        }
    }
}
