//! Points in `R^d`.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used by every geometric predicate in the crate.
pub const TAU: f64 = 1e-9;

/// A point in `R^d` with finite coordinates.
///
/// The finiteness check happens once, here; everything downstream may assume
/// it. Arithmetic helpers return plain `Vector`s because finite inputs can only
/// overflow through pathological magnitudes, which [`Vector::new`] rejects at
/// the broadcast boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if let Some((index, &value)) = coords.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Vector(coords))
    }

    pub fn zeros(d: usize) -> Self {
        assert!(d > 0, "zero-dimensional vector");
        Vector(vec![0.0; d])
    }

    /// Builds a vector without the finiteness check. Callers guarantee the
    /// coordinates are finite (they come from arithmetic on finite vectors).
    pub(crate) fn from_finite(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty() && coords.iter().all(|c| c.is_finite()));
        Vector(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Unchecked distance; both vectors must share a dimension.
    pub(crate) fn dist(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn neg(&self) -> Vector {
        Vector(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|c| c * s).collect())
    }

    /// Re-checks finiteness after arithmetic that may have overflowed.
    pub fn ensure_finite(&self) -> Result<()> {
        match self.0.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            Some((index, &value)) => Err(Error::NonFinite { index, value }),
            None => Ok(()),
        }
    }

    pub fn ensure_dim(&self, d: usize) -> Result<()> {
        if self.dim() == d {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: d,
                actual: self.dim(),
            })
        }
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Vector::new(coords)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

impl<'a> IntoIterator for &'a Vector {
    type Item = &'a f64;
    type IntoIter = std::slice::Iter<'a, f64>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Checks that all vectors share one dimension and returns it.
pub fn common_dim(vs: &[Vector]) -> Result<usize> {
    let first = vs.first().ok_or(Error::Empty("vector set"))?;
    let d = first.dim();
    for v in &vs[1..] {
        v.ensure_dim(d)?;
    }
    Ok(d)
}

/// Euclidean distance `‖a − b‖₂`.
pub fn euclidean_distance(a: &Vector, b: &Vector) -> Result<f64> {
    b.ensure_dim(a.dim())?;
    Ok(a.dist(b))
}

/// Largest pairwise distance in `vs`; zero for a singleton.
pub fn diameter(vs: &[Vector]) -> Result<f64> {
    common_dim(vs)?;
    let mut best = 0.0f64;
    for (i, a) in vs.iter().enumerate() {
        for b in &vs[i + 1..] {
            best = best.max(a.dist(b));
        }
    }
    Ok(best)
}
