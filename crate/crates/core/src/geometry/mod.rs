//! Evaluation machinery: the set of possible geometric medians, covering
//! balls, median hyperboxes and approximation ratios.

mod ball;
mod hull;
mod ratio;
mod s_geo;

pub use ball::{min_covering_ball, CoveringBall, MAX_BALL_DIM};
pub use hull::{convex_hull_2d, convex_hull_membership_2d};
pub use ratio::{approximation_ratio, ApproxRatio};
pub use s_geo::{enumerate_s_geo, geo_hyperbox, GeoMedianSet, MAX_S_GEO_INPUTS};

use crate::hyperbox::Hyperbox;

/// Longest edge of a hyperbox.
pub fn e_max(h: &Hyperbox) -> f64 {
    h.e_max()
}
