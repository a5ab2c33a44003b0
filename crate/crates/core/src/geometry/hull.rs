use crate::error::{Error, Result};
use crate::vector::{Vector, TAU};

type P = (f64, f64);

fn cross(o: P, a: P, b: P) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn seg_dist(p: P, a: P, b: P) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let s = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    let (qx, qy) = (a.0 + s * dx, a.1 + s * dy);
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}

/// Counter-clockwise convex hull (monotone chain), collinear points dropped.
pub fn convex_hull_2d(pts: &[Vector]) -> Result<Vec<Vector>> {
    let mut ps: Vec<P> = pts
        .iter()
        .map(|v| {
            v.ensure_dim(2)?;
            Ok((v[0], v[1]))
        })
        .collect::<Result<_>>()?;
    if ps.is_empty() {
        return Err(Error::Empty("convex_hull_2d"));
    }
    ps.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    ps.dedup();
    if ps.len() < 3 {
        return Ok(ps.into_iter().map(|(x, y)| Vector::from_finite(vec![x, y])).collect());
    }
    let mut hull: Vec<P> = Vec::with_capacity(2 * ps.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &P>> = if pass == 0 {
            Box::new(ps.iter())
        } else {
            Box::new(ps.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    Ok(hull.into_iter().map(|(x, y)| Vector::from_finite(vec![x, y])).collect())
}

/// Whether `p` lies in the convex hull of `pts`, up to distance `TAU`.
pub fn convex_hull_membership_2d(p: &Vector, pts: &[Vector]) -> Result<bool> {
    p.ensure_dim(2)?;
    let hull = convex_hull_2d(pts)?;
    let q = (p[0], p[1]);
    let hp: Vec<P> = hull.iter().map(|v| (v[0], v[1])).collect();
    Ok(match hp.len() {
        1 => seg_dist(q, hp[0], hp[0]) <= TAU,
        2 => seg_dist(q, hp[0], hp[1]) <= TAU,
        k => {
            let inside = (0..k).all(|i| {
                let (a, b) = (hp[i], hp[(i + 1) % k]);
                let len = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
                cross(a, b, q) >= -TAU * len
            });
            // thin slivers: accept anything within TAU of the boundary
            inside || (0..k).any(|i| seg_dist(q, hp[i], hp[(i + 1) % k]) <= TAU)
        }
    })
}
