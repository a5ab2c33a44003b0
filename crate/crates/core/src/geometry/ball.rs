use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::vector::{common_dim, Vector, TAU};

/// Exact Welzl recursion is used up to this dimension.
pub const MAX_BALL_DIM: usize = 10;

const SHUFFLE_SEED: u64 = 0x5eed_ba11;

#[derive(Debug, Clone, PartialEq)]
pub struct CoveringBall {
    pub center: Vector,
    pub radius: f64,
}

impl CoveringBall {
    pub fn contains(&self, p: &Vector) -> bool {
        self.center.dist(p) <= self.radius + TAU
    }
}

/// Circumscribed ball of `support` inside its affine hull, or `None` when
/// the points are affinely dependent.
fn circumball(pts: &[Vector], support: &[usize]) -> Option<(Vec<f64>, f64)> {
    let p0 = &pts[*support.first()?];
    let d = p0.dim();
    let k = support.len() - 1;
    if k == 0 {
        return Some((p0.coords().to_vec(), 0.0));
    }
    let a: Vec<Vec<f64>> = support[1..]
        .iter()
        .map(|&i| pts[i].iter().zip(p0.iter()).map(|(x, y)| x - y).collect())
        .collect();
    let dot = |u: &[f64], w: &[f64]| u.iter().zip(w).map(|(x, y)| x * y).sum::<f64>();
    // Gram system G λ = b, augmented
    let mut g: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            let mut row: Vec<f64> = (0..k).map(|l| dot(&a[j], &a[l])).collect();
            row.push(dot(&a[j], &a[j]) / 2.0);
            row
        })
        .collect();
    let scale = g.iter().enumerate().map(|(j, r)| r[j]).fold(0.0, f64::max);
    for col in 0..k {
        let piv = (col..k).max_by(|&x, &y| g[x][col].abs().total_cmp(&g[y][col].abs()))?;
        if g[piv][col].abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return None;
        }
        g.swap(col, piv);
        for r in 0..k {
            if r != col {
                let factor = g[r][col] / g[col][col];
                if factor != 0.0 {
                    for c in col..=k {
                        g[r][c] -= factor * g[col][c];
                    }
                }
            }
        }
    }
    let lambda: Vec<f64> = (0..k).map(|j| g[j][k] / g[j][j]).collect();
    let mut center = p0.coords().to_vec();
    for (lj, aj) in lambda.iter().zip(&a) {
        for c in 0..d {
            center[c] += lj * aj[c];
        }
    }
    let radius = support
        .iter()
        .map(|&i| pts[i].iter().zip(&center).map(|(x, c)| (x - c) * (x - c)).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    center.iter().all(|c| c.is_finite()).then_some((center, radius))
}

struct Welzl<'a> {
    pts: &'a [Vector],
    order: Vec<usize>,
    support: Vec<usize>,
    center: Vec<f64>,
    radius: f64,
    max_support: usize,
}

impl Welzl<'_> {
    fn outside(&self, i: usize) -> bool {
        if self.radius < 0.0 {
            return true;
        }
        let d2: f64 = self.pts[i]
            .iter()
            .zip(&self.center)
            .map(|(x, c)| (x - c) * (x - c))
            .sum();
        d2.sqrt() > self.radius + TAU
    }

    /// Move-to-front Welzl: smallest ball containing `order[..end]` with the
    /// current support on its boundary.
    fn mtf(&mut self, end: usize) {
        match circumball(self.pts, &self.support) {
            Some((c, r)) => {
                self.center = c;
                self.radius = r;
            }
            None if self.support.is_empty() => {
                self.radius = -1.0;
            }
            None => return,
        }
        if self.support.len() == self.max_support {
            return;
        }
        for i in 0..end {
            let p = self.order[i];
            if self.outside(p) {
                self.support.push(p);
                if circumball(self.pts, &self.support).is_none() {
                    // affinely dependent support: numerically degenerate, skip
                    self.support.pop();
                    continue;
                }
                self.mtf(i);
                self.support.pop();
                let moved = self.order.remove(i);
                self.order.insert(0, moved);
            }
        }
    }
}

/// Minimum enclosing ball, exact for `d <= 10`.
///
/// The input order is shuffled with a fixed seed before the move-to-front
/// recursion so the expected running time is linear and results are
/// reproducible.
pub fn min_covering_ball(pts: &[Vector]) -> Result<CoveringBall> {
    let d = common_dim(pts).map_err(|e| match e {
        Error::Empty(_) => Error::Empty("min_covering_ball"),
        e => e,
    })?;
    if d > MAX_BALL_DIM {
        return Err(Error::Capacity {
            what: "min_covering_ball dimension",
            limit: MAX_BALL_DIM,
            got: d,
        });
    }
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(SHUFFLE_SEED));
    let mut w = Welzl {
        pts,
        order,
        support: Vec::with_capacity(d + 1),
        center: vec![0.0; d],
        radius: -1.0,
        max_support: d + 1,
    };
    w.mtf(pts.len());
    let center = Vector::from_finite(w.center);
    // numerically skipped points (if any) are absorbed by widening
    let radius = pts.iter().map(|p| center.dist(p)).fold(w.radius.max(0.0), f64::max);
    Ok(CoveringBall { center, radius })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn elementary_balls() {
        let b = min_covering_ball(&[v(&[1.0, 2.0])]).unwrap();
        assert_eq!((b.center.clone(), b.radius), (v(&[1.0, 2.0]), 0.0));

        let b = min_covering_ball(&[v(&[0.0, 0.0]), v(&[4.0, 0.0])]).unwrap();
        assert!(b.center.dist(&v(&[2.0, 0.0])) < 1e-12 && (b.radius - 2.0).abs() < 1e-12);

        let b = min_covering_ball(&[v(&[0.0, 0.0]), v(&[2.0, 0.0]), v(&[0.0, 2.0])]).unwrap();
        assert!(b.center.dist(&v(&[1.0, 1.0])) < 1e-12);
        assert!((b.radius - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn duplicates_and_interior_points() {
        let pts = vec![v(&[0.0, 0.0]), v(&[0.0, 0.0]), v(&[2.0, 0.0]), v(&[1.0, 0.1]), v(&[2.0, 0.0])];
        let b = min_covering_ball(&pts).unwrap();
        assert!((b.radius - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_cap() {
        assert!(matches!(
            min_covering_ball(&[Vector::zeros(11)]),
            Err(Error::Capacity { .. })
        ));
        assert!(min_covering_ball(&[]).is_err());
    }
}
