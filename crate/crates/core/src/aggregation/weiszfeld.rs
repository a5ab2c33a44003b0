use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::{common_dim, Vector};

use super::mean;

/// Stopping and guard parameters for the Weiszfeld iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WeiszfeldConfig {
    /// Stop once an iterate moves less than this.
    pub tol: f64,
    pub max_iter: usize,
    /// Inputs closer than this to the iterate count as coinciding with it.
    pub singularity_eps: f64,
}

impl Default for WeiszfeldConfig {
    fn default() -> Self {
        WeiszfeldConfig {
            tol: 1e-9,
            max_iter: 1000,
            singularity_eps: 1e-12,
        }
    }
}

impl WeiszfeldConfig {
    pub fn new(tol: f64, max_iter: usize, singularity_eps: f64) -> Result<Self> {
        let cfg = WeiszfeldConfig {
            tol,
            max_iter,
            singularity_eps,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParams(format!("weiszfeld tol must be > 0, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParams("weiszfeld max_iter must be >= 1".into()));
        }
        if !(self.singularity_eps > 0.0 && self.singularity_eps.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "weiszfeld singularity_eps must be > 0, got {}",
                self.singularity_eps
            )));
        }
        Ok(())
    }
}

/// Sum of Euclidean distances from `mu` to every point of `vs`.
pub fn median_objective(vs: &[Vector], mu: &Vector) -> f64 {
    vs.iter().map(|v| v.dist(mu)).sum()
}

/// Geometric median of `vs`: the point minimizing the sum of Euclidean
/// distances to the inputs.
///
/// Starts from the mean and runs the Weiszfeld fixed point
/// `μ ← Σ vᵢ/‖vᵢ−μ‖ / Σ 1/‖vᵢ−μ‖`. When the iterate lands on an input point
/// (within `singularity_eps`) the step uses the Vardi–Zhang correction, which
/// keeps the iterate there exactly when that input is optimal and otherwise
/// moves off it, so data points never act as false fixed points.
///
/// Two special cases bypass the iteration:
/// * two points: the median is any point of the segment; the midpoint is returned.
/// * `d = 1`: the exact coordinate median (midpoint of the middle pair for
///   even counts).
pub fn geometric_median(vs: &[Vector], cfg: &WeiszfeldConfig) -> Result<Vector> {
    let d = common_dim(vs).map_err(|e| match e {
        Error::Empty(_) => Error::Empty("geometric_median"),
        e => e,
    })?;
    match vs.len() {
        1 => return Ok(vs[0].clone()),
        2 => return Ok(vs[0].add(&vs[1]).scale(0.5)),
        _ => {}
    }
    if d == 1 {
        let mut xs: Vec<f64> = vs.iter().map(|v| v[0]).collect();
        xs.sort_by(f64::total_cmp);
        let m = xs.len();
        let med = if m % 2 == 1 {
            xs[m / 2]
        } else {
            xs[m / 2 - 1] + (xs[m / 2] - xs[m / 2 - 1]) / 2.0
        };
        return Ok(Vector::from_finite(vec![med]));
    }

    let mut y = mean(vs)?;
    let mut num = vec![0.0; d];
    let mut pull = vec![0.0; d];
    for _ in 0..cfg.max_iter {
        num.iter_mut().for_each(|x| *x = 0.0);
        pull.iter_mut().for_each(|x| *x = 0.0);
        let mut den = 0.0;
        let mut coincident = 0usize;
        for v in vs {
            let dist = v.dist(&y);
            if dist < cfg.singularity_eps {
                coincident += 1;
                continue;
            }
            let w = 1.0 / dist;
            den += w;
            for k in 0..d {
                num[k] += w * v[k];
                pull[k] += w * (v[k] - y[k]);
            }
        }
        if den == 0.0 {
            // every input sits on the iterate
            break;
        }
        let weiszfeld: Vec<f64> = num.iter().map(|x| x / den).collect();
        let next = if coincident == 0 {
            weiszfeld
        } else {
            let r = pull.iter().map(|x| x * x).sum::<f64>().sqrt();
            let eta = coincident as f64;
            if r <= eta {
                // the coincident input is the minimizer
                break;
            }
            let keep = eta / r;
            weiszfeld
                .iter()
                .zip(y.iter())
                .map(|(t, yk)| (1.0 - keep) * t + keep * yk)
                .collect()
        };
        let next = extrapolate(vs, &y, Vector::from_finite(next));
        let moved = next.dist(&y);
        y = next;
        if moved < cfg.tol {
            break;
        }
    }
    Ok(snap_to_optimal_input(vs, y, cfg))
}

/// Doubles the step `y → next` while the objective keeps decreasing.
///
/// On nearly collinear inputs the plain fixed point contracts at a rate close
/// to 1 and would stop thousands of iterations short of the minimizer; the
/// objective is convex, so moving further along a descent step is safe and
/// leaves fixed points unchanged.
fn extrapolate(vs: &[Vector], y: &Vector, next: Vector) -> Vector {
    const MAX_DOUBLINGS: usize = 40;
    let step = next.sub(y);
    let mut best = next;
    let mut best_obj = median_objective(vs, &best);
    let mut scale = 2.0;
    for _ in 0..MAX_DOUBLINGS {
        let cand = y.add(&step.scale(scale));
        let obj = median_objective(vs, &cand);
        if !(obj < best_obj) {
            break;
        }
        best = cand;
        best_obj = obj;
        scale *= 2.0;
    }
    best
}

/// Replaces a converged iterate by the nearby input point when that input is
/// itself an exact minimizer: `‖Σ_{vᵢ≠p} (vᵢ−p)/‖vᵢ−p‖‖ <= multiplicity(p)`.
/// Weiszfeld approaches such vertices only linearly, so this removes the
/// residual `O(tol)` offset.
fn snap_to_optimal_input(vs: &[Vector], y: Vector, cfg: &WeiszfeldConfig) -> Vector {
    let snap_radius = 1e3 * cfg.tol;
    let Some((nearest, dist)) = vs
        .iter()
        .map(|v| (v, v.dist(&y)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
    else {
        return y;
    };
    if dist == 0.0 || dist > snap_radius {
        return y;
    }
    let d = y.dim();
    let mut pull = vec![0.0; d];
    let mut multiplicity = 0usize;
    for v in vs {
        let r = v.dist(nearest);
        if r < cfg.singularity_eps {
            multiplicity += 1;
        } else {
            for k in 0..d {
                pull[k] += (v[k] - nearest[k]) / r;
            }
        }
    }
    let r = pull.iter().map(|x| x * x).sum::<f64>().sqrt();
    if r <= multiplicity as f64 {
        nearest.clone()
    } else {
        y
    }
}
