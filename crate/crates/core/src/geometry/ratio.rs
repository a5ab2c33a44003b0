use std::fmt;

use serde::{Serialize, Serializer};

use crate::vector::{Vector, TAU};

use super::CoveringBall;

/// Distance to the true median measured in covering-ball radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ApproxRatio {
    Finite(f64),
    /// Positive distance over a zero-radius ball.
    Unbounded,
}

impl ApproxRatio {
    pub fn is_unbounded(&self) -> bool {
        matches!(self, ApproxRatio::Unbounded)
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            ApproxRatio::Finite(r) => Some(r),
            ApproxRatio::Unbounded => None,
        }
    }

    /// `true` when the ratio is finite and at most `bound`.
    pub fn within(&self, bound: f64) -> bool {
        self.finite().is_some_and(|r| r <= bound)
    }
}

impl fmt::Display for ApproxRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ApproxRatio::Finite(r) => write!(f, "{r:.16e}"),
            ApproxRatio::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for ApproxRatio {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ApproxRatio::Finite(r) => s.serialize_f64(*r),
            ApproxRatio::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

pub fn approximation_ratio(output: &Vector, true_geo: &Vector, ball: &CoveringBall) -> ApproxRatio {
    let dist = output.dist(true_geo);
    if ball.radius < TAU {
        if dist < TAU {
            ApproxRatio::Finite(0.0)
        } else {
            ApproxRatio::Unbounded
        }
    } else {
        ApproxRatio::Finite(dist / ball.radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball(r: f64) -> CoveringBall {
        CoveringBall {
            center: Vector::zeros(2),
            radius: r,
        }
    }

    #[test]
    fn ratio_cases() {
        let o = Vector::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(approximation_ratio(&o, &o, &ball(1.0)), ApproxRatio::Finite(0.0));
        let far = Vector::new(vec![1.0, 3.0]).unwrap();
        assert_eq!(approximation_ratio(&far, &o, &ball(1.0)), ApproxRatio::Finite(2.0));
        assert_eq!(approximation_ratio(&far, &o, &ball(0.0)), ApproxRatio::Unbounded);
        assert_eq!(approximation_ratio(&o, &o, &ball(0.0)), ApproxRatio::Finite(0.0));
        assert_eq!(ApproxRatio::Unbounded.to_string(), "unbounded");
        assert!(!ApproxRatio::Unbounded.within(f64::MAX));
    }
}
