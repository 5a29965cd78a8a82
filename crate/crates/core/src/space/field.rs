use super::{DiscreteSpace, PointId};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Real-valued function on the points of a space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Field(Vec<f64>);

impl Field {
    pub fn new(values: Vec<f64>) -> Self {
        Field(values)
    }
    pub fn zeros(n: usize) -> Self {
        Field(vec![0.0; n])
    }
    pub fn constant(n: usize, c: f64) -> Self {
        Field(vec![c; n])
    }
    pub fn from_fn(space: &DiscreteSpace, f: impl FnMut(PointId) -> f64) -> Self {
        Field((0..space.len()).map(f).collect())
    }
    pub fn values(&self) -> &[f64] {
        &self.0
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    pub fn get(&self, x: PointId) -> f64 {
        self.0[x]
    }
    pub fn check(&self, space: &DiscreteSpace) -> Result<()> {
        if self.0.len() != space.len() {
            return Err(Error::ShapeMismatch { expected: space.len(), got: self.0.len() });
        }
        Ok(())
    }
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field(self.0.iter().map(|&v| f(v)).collect())
    }
    pub fn abs(&self) -> Field {
        self.map(f64::abs)
    }
    pub fn scale(&self, c: f64) -> Field {
        self.map(|v| c * v)
    }
    pub fn sub(&self, other: &Field) -> Field {
        Field(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
    pub fn add(&self, other: &Field) -> Field {
        Field(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
    pub fn mul(&self, other: &Field) -> Field {
        Field(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect())
    }
    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
    pub fn integral(&self, space: &DiscreteSpace) -> f64 {
        self.0.iter().zip(space.weights()).map(|(v, w)| v * w).sum()
    }
    pub fn l1_norm(&self, space: &DiscreteSpace) -> f64 {
        self.0.iter().zip(space.weights()).map(|(v, w)| v.abs() * w).sum()
    }
    pub fn lp_norm(&self, space: &DiscreteSpace, p: f64) -> f64 {
        if p.is_infinite() {
            return self.sup_norm();
        }
        self.0
            .iter()
            .zip(space.weights())
            .map(|(v, w)| v.abs().powf(p) * w)
            .sum::<f64>()
            .powf(1.0 / p)
    }
    /// Indices where the value is nonzero.
    pub fn support(&self) -> Vec<PointId> {
        (0..self.0.len()).filter(|&i| self.0[i] != 0.0).collect()
    }
}

impl From<Vec<f64>> for Field {
    fn from(v: Vec<f64>) -> Self {
        Field(v)
    }
}
