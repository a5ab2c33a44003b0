//! Single-shot aggregation rules over a multiset of received vectors.
//!
//! Every rule here is a pure function. All ties are broken towards the
//! smallest index (or the lexicographically smallest index set) so that
//! simulations are reproducible bit for bit.

mod krum;
mod min_diameter;
mod trim;
mod weiszfeld;

pub use krum::{krum, krum_scores, krum_with, multi_krum, multi_krum_with, KrumDistance};
pub use min_diameter::{min_diameter_subset, min_diameter_subsets, subset_diameter, MAX_MIN_DIAMETER_INPUTS};
pub use trim::{coordinate_trim, mean_hyperbox};
pub use weiszfeld::{geometric_median, median_objective, WeiszfeldConfig};

use crate::error::{Error, Result};
use crate::vector::{common_dim, Vector};

/// Coordinate-wise arithmetic mean.
pub fn mean(vs: &[Vector]) -> Result<Vector> {
    let d = common_dim(vs).map_err(|e| match e {
        Error::Empty(_) => Error::Empty("mean"),
        e => e,
    })?;
    let mut acc = vec![0.0; d];
    for v in vs {
        for (a, x) in acc.iter_mut().zip(v.iter()) {
            *a += x;
        }
    }
    let n = vs.len() as f64;
    Ok(Vector::from_finite(acc.into_iter().map(|a| a / n).collect()))
}

/// Mean of the vectors selected by `idx`.
pub(crate) fn mean_of(vs: &[Vector], idx: &[usize]) -> Vector {
    let d = vs[idx[0]].dim();
    let mut acc = vec![0.0; d];
    for &i in idx {
        for (a, x) in acc.iter_mut().zip(vs[i].iter()) {
            *a += x;
        }
    }
    let n = idx.len() as f64;
    Vector::from_finite(acc.into_iter().map(|a| a / n).collect())
}

pub(crate) fn pick(vs: &[Vector], idx: &[usize]) -> Vec<Vector> {
    idx.iter().map(|&i| vs[i].clone()).collect()
}

/// The input vector with the smallest total distance to all inputs.
pub fn medoid(vs: &[Vector]) -> Result<Vector> {
    common_dim(vs).map_err(|e| match e {
        Error::Empty(_) => Error::Empty("medoid"),
        e => e,
    })?;
    let mut best = (f64::INFINITY, 0usize);
    for (i, v) in vs.iter().enumerate() {
        let score: f64 = vs.iter().map(|w| v.dist(w)).sum();
        if score < best.0 {
            best = (score, i);
        }
    }
    Ok(vs[best.1].clone())
}
