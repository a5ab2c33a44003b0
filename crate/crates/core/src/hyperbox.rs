//! Axis-parallel boxes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::{common_dim, Vector};

/// Closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidParams(format!("interval [{lo}, {hi}] is not finite")));
        }
        if lo > hi {
            return Err(Error::InvalidParams(format!("interval [{lo}, {hi}] has lo > hi")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        self.lo + (self.hi - self.lo) / 2.0
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }
}

/// Cartesian product of one interval per coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperbox {
    intervals: Vec<Interval>,
}

impl Hyperbox {
    pub fn new(intervals: Vec<Interval>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::ZeroDimension);
        }
        for iv in &intervals {
            Interval::new(iv.lo, iv.hi)?;
        }
        Ok(Hyperbox { intervals })
    }

    /// Degenerate box holding exactly `v`.
    pub fn point(v: &Vector) -> Self {
        Hyperbox {
            intervals: v.iter().map(|&x| Interval::point(x)).collect(),
        }
    }

    /// Smallest box containing every vector of `vs`.
    pub fn bounding(vs: &[Vector]) -> Result<Self> {
        let d = common_dim(vs)?;
        let mut intervals = vec![Interval { lo: f64::INFINITY, hi: f64::NEG_INFINITY }; d];
        for v in vs {
            for (iv, &x) in intervals.iter_mut().zip(v.iter()) {
                iv.lo = iv.lo.min(x);
                iv.hi = iv.hi.max(x);
            }
        }
        Ok(Hyperbox { intervals })
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn contains(&self, v: &Vector) -> bool {
        v.dim() == self.dim() && self.intervals.iter().zip(v.iter()).all(|(iv, &x)| iv.contains(x))
    }

    /// Membership with an absolute slack on every side.
    pub fn contains_within(&self, v: &Vector, tol: f64) -> bool {
        v.dim() == self.dim()
            && self
                .intervals
                .iter()
                .zip(v.iter())
                .all(|(iv, &x)| iv.lo - tol <= x && x <= iv.hi + tol)
    }

    /// `true` when `other` lies inside `self` (up to `tol`).
    pub fn contains_box(&self, other: &Hyperbox, tol: f64) -> bool {
        self.dim() == other.dim()
            && self
                .intervals
                .iter()
                .zip(&other.intervals)
                .all(|(a, b)| a.lo - tol <= b.lo && b.hi <= a.hi + tol)
    }

    pub fn midpoint(&self) -> Vector {
        Vector::from_finite(self.intervals.iter().map(Interval::mid).collect())
    }

    /// Length of the longest edge.
    pub fn e_max(&self) -> f64 {
        self.intervals.iter().map(Interval::len).fold(0.0, f64::max)
    }

    /// Length of the main diagonal.
    pub fn diagonal(&self) -> f64 {
        self.intervals.iter().map(|iv| iv.len() * iv.len()).sum::<f64>().sqrt()
    }

    /// Clamps `v` coordinate-wise into the box.
    pub fn clamp(&self, v: &Vector) -> Vector {
        Vector::from_finite(
            self.intervals
                .iter()
                .zip(v.iter())
                .map(|(iv, &x)| x.clamp(iv.lo, iv.hi))
                .collect(),
        )
    }
}

/// Coordinate-wise intersection; `Ok(None)` when it is empty in some coordinate.
pub fn box_intersection(a: &Hyperbox, b: &Hyperbox) -> Result<Option<Hyperbox>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let intervals: Option<Vec<Interval>> = a
        .intervals
        .iter()
        .zip(&b.intervals)
        .map(|(x, y)| x.intersect(y))
        .collect();
    Ok(intervals.map(|intervals| Hyperbox { intervals }))
}
