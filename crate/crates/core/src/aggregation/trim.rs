use crate::error::{Error, Result};
use crate::hyperbox::{Hyperbox, Interval};
use crate::params::SystemParams;
use crate::vector::{common_dim, Vector};

fn check_received(received: &[Vector], params: &SystemParams, what: &'static str) -> Result<usize> {
    let d = common_dim(received)?;
    let q = params.quorum();
    if received.len() < q {
        return Err(Error::TooFewVectors {
            what,
            needed: q,
            got: received.len(),
        });
    }
    if received.len() > params.n {
        return Err(Error::InvalidParams(format!(
            "{what}: received {} vectors from {} nodes",
            received.len(),
            params.n
        )));
    }
    Ok(d)
}

fn sorted_column(received: &[Vector], k: usize) -> Vec<f64> {
    let mut col: Vec<f64> = received.iter().map(|v| v[k]).collect();
    col.sort_by(f64::total_cmp);
    col
}

/// Locally trusted hyperbox: per coordinate, drop the `m − (n − t)` smallest
/// and largest received values and span what is left.
pub fn coordinate_trim(received: &[Vector], params: &SystemParams) -> Result<Hyperbox> {
    let d = check_received(received, params, "coordinate_trim")?;
    let q = params.quorum();
    let m = received.len();
    let intervals = (0..d)
        .map(|k| {
            let col = sorted_column(received, k);
            // 1-based ranks m − q + 1 and q
            Interval { lo: col[m - q], hi: col[q - 1] }
        })
        .collect();
    Hyperbox::new(intervals)
}

/// Smallest box containing the means of every `(n − t)`-subset of
/// `received`.
///
/// Per coordinate the extreme subset means are the mean of the `n − t`
/// smallest and of the `n − t` largest values, so no enumeration is needed.
pub fn mean_hyperbox(received: &[Vector], params: &SystemParams) -> Result<Hyperbox> {
    let d = check_received(received, params, "mean_hyperbox")?;
    let q = params.quorum();
    let m = received.len();
    let intervals = (0..d)
        .map(|k| {
            let col = sorted_column(received, k);
            let lo = col[..q].iter().sum::<f64>() / q as f64;
            let hi = col[m - q..].iter().sum::<f64>() / q as f64;
            Interval { lo, hi: hi.max(lo) }
        })
        .collect();
    Hyperbox::new(intervals)
}
