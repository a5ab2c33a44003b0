use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::vector::{common_dim, Vector};

use super::mean_of;

/// Distance used inside Krum neighbour sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KrumDistance {
    /// `‖vᵢ − vₗ‖`, the form used throughout this crate.
    #[default]
    Plain,
    /// `‖vᵢ − vₗ‖²`, the originally published variant.
    Squared,
}

/// Krum score of every vector: the summed distance to its `n − t − 1`
/// nearest other vectors (neighbour ties broken by smaller index).
pub fn krum_scores(vs: &[Vector], params: &SystemParams, distance: KrumDistance) -> Result<Vec<f64>> {
    common_dim(vs).map_err(|e| match e {
        Error::Empty(_) => Error::Empty("krum"),
        e => e,
    })?;
    let q = params.quorum();
    if vs.len() < q {
        return Err(Error::TooFewVectors {
            what: "krum",
            needed: q,
            got: vs.len(),
        });
    }
    if q < 2 {
        return Err(Error::InvalidParams("krum needs n − t − 1 >= 1 neighbours".into()));
    }
    let neighbours = q - 1;
    let scores = vs
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut dists: Vec<(f64, usize)> = vs
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(j, w)| {
                    let d = v.dist(w);
                    let d = match distance {
                        KrumDistance::Plain => d,
                        KrumDistance::Squared => d * d,
                    };
                    (d, j)
                })
                .collect();
            dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            dists[..neighbours].iter().map(|(d, _)| d).sum()
        })
        .collect();
    Ok(scores)
}

/// Indices ordered by ascending Krum score, ties by index.
fn ranked(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    idx
}

pub fn krum(vs: &[Vector], params: &SystemParams) -> Result<Vector> {
    krum_with(vs, params, KrumDistance::Plain)
}

pub fn krum_with(vs: &[Vector], params: &SystemParams, distance: KrumDistance) -> Result<Vector> {
    let scores = krum_scores(vs, params, distance)?;
    Ok(vs[ranked(&scores)[0]].clone())
}

/// Mean of the `q` vectors with the smallest Krum scores.
pub fn multi_krum(vs: &[Vector], params: &SystemParams, q: usize) -> Result<Vector> {
    multi_krum_with(vs, params, q, KrumDistance::Plain)
}

pub fn multi_krum_with(vs: &[Vector], params: &SystemParams, q: usize, distance: KrumDistance) -> Result<Vector> {
    if q == 0 || q > vs.len() {
        return Err(Error::InvalidParams(format!(
            "multi-krum q = {q} must lie in 1..={}",
            vs.len()
        )));
    }
    let scores = krum_scores(vs, params, distance)?;
    let order = ranked(&scores);
    Ok(mean_of(vs, &order[..q]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn cluster() -> Vec<Vector> {
        vec![v(&[0.0, 0.0]), v(&[0.1, 0.0]), v(&[0.2, 0.0]), v(&[10.0, 10.0])]
    }

    /// Brute force: for each i, enumerate all (n−t−1)-subsets of the others
    /// and take the minimal distance sum. Independent of the sort-based path.
    fn brute_scores(vs: &[Vector], k: usize) -> Vec<f64> {
        (0..vs.len())
            .map(|i| {
                let others: Vec<usize> = (0..vs.len()).filter(|&j| j != i).collect();
                crate::subsets::Combinations::new(others.len(), k)
                    .map(|c| c.iter().map(|&j| vs[i].dist(&vs[others[j]])).sum::<f64>())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    #[test]
    fn krum_picks_cluster_center() {
        let p = SystemParams::new(4, 1, 1, 2).unwrap();
        let vs = cluster();
        let scores = krum_scores(&vs, &p, KrumDistance::Plain).unwrap();
        let brute = brute_scores(&vs, 2);
        for (a, b) in scores.iter().zip(&brute) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(krum(&vs, &p).unwrap(), v(&[0.1, 0.0]));
    }

    #[test]
    fn krum_identical_inputs() {
        let p = SystemParams::new(4, 1, 0, 2).unwrap();
        let vs = vec![v(&[1.0, 2.0]); 4];
        assert_eq!(krum(&vs, &p).unwrap(), v(&[1.0, 2.0]));
        assert_eq!(multi_krum(&vs, &p, 3).unwrap(), v(&[1.0, 2.0]));
    }

    #[test]
    fn multi_krum_averages_best_scores() {
        let p = SystemParams::new(4, 1, 1, 2).unwrap();
        let vs = cluster();
        let out = multi_krum(&vs, &p, 3).unwrap();
        assert!(out.dist(&v(&[0.1, 0.0])) < 1e-12);
        assert_eq!(multi_krum(&vs, &p, 1).unwrap(), krum(&vs, &p).unwrap());
        assert!(multi_krum(&vs, &p, 0).is_err());
        assert!(multi_krum(&vs, &p, 5).is_err());
    }

    #[test]
    fn krum_rejects_too_few() {
        let p = SystemParams::new(4, 1, 1, 2).unwrap();
        assert!(matches!(
            krum(&cluster()[..2], &p),
            Err(Error::TooFewVectors { needed: 3, got: 2, .. })
        ));
    }

    #[test]
    fn squared_variant_can_differ() {
        // plain: 0 -> 1+1 = 2, 1 -> 1+1 = 2, 2 -> ... squared emphasises far points
        let p = SystemParams::new(4, 1, 0, 1).unwrap();
        let vs: Vec<Vector> = [0.0, 1.0, 2.0, 2.9].iter().map(|&x| v(&[x])).collect();
        let plain = krum_scores(&vs, &p, KrumDistance::Plain).unwrap();
        let sq = krum_scores(&vs, &p, KrumDistance::Squared).unwrap();
        assert!((plain[1] - 2.0).abs() < 1e-12);
        assert!((sq[1] - 2.0).abs() < 1e-12);
        assert!((sq[2] - (1.0 + 0.81)).abs() < 1e-12);
    }
}
