//! Byzantine-tolerant vector aggregation and multidimensional approximate
//! agreement.
//!
//! The crate has four layers:
//!
//! * [`aggregation`]: single-shot rules (mean, geometric median, Krum,
//!   Multi-Krum, medoid, minimum-diameter subsets, coordinate trimming).
//! * [`geometry`]: the set of possible subset medians, covering balls and
//!   approximation ratios.
//! * [`agreement`] and [`adversary`]: a synchronous round simulator with
//!   reliable broadcast, Byzantine behaviours and the known worst-case
//!   constructions.
//! * [`learning`]: centralized and decentralized collaborative learning on
//!   small synthetic datasets.
//!
//! ```
//! use byzagg::aggregation::{geometric_median, WeiszfeldConfig};
//! use byzagg::Vector;
//!
//! let pts: Vec<Vector> = [[0.0, 0.0], [4.0, 0.0], [0.0, 4.0], [4.0, 4.0]]
//!     .iter()
//!     .map(|c| Vector::new(c.to_vec()).unwrap())
//!     .collect();
//! let m = geometric_median(&pts, &WeiszfeldConfig::default()).unwrap();
//! assert!((m[0] - 2.0).abs() < 1e-9 && (m[1] - 2.0).abs() < 1e-9);
//! ```

pub mod adversary;
pub mod aggregation;
pub mod agreement;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod hyperbox;
pub mod instance;
pub mod learning;
pub mod params;
pub mod repro;
pub mod subsets;
pub mod vector;

pub use error::{Error, Result};
pub use hyperbox::{box_intersection, Hyperbox, Interval};
pub use instance::AgreementInstance;
pub use params::SystemParams;
pub use vector::{common_dim, diameter, euclidean_distance, Vector, TAU};

// book chapters double as doctests
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/aggregation.md")]
    mod aggregation {}
    #[doc = include_str!("../../../book/src/agreement.md")]
    mod agreement {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/learning.md")]
    mod learning {}
}
