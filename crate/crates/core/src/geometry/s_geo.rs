use rayon::prelude::*;

use crate::aggregation::{geometric_median, pick, WeiszfeldConfig};
use crate::error::{Error, Result};
use crate::hyperbox::Hyperbox;
use crate::params::SystemParams;
use crate::subsets::Combinations;
use crate::vector::{common_dim, Vector};

/// Enumeration bound: `C(15, 10) = 3003` Weiszfeld runs.
pub const MAX_S_GEO_INPUTS: usize = 15;

/// Geometric medians of every `(n − t)`-subset, in lexicographic subset order.
#[derive(Debug, Clone, PartialEq)]
pub struct GeoMedianSet {
    pub medians: Vec<Vector>,
    pub subset_indices: Vec<Vec<usize>>,
}

pub fn enumerate_s_geo(vs: &[Vector], params: &SystemParams, cfg: &WeiszfeldConfig) -> Result<GeoMedianSet> {
    common_dim(vs)?;
    if vs.len() > MAX_S_GEO_INPUTS {
        return Err(Error::Capacity {
            what: "enumerate_s_geo",
            limit: MAX_S_GEO_INPUTS,
            got: vs.len(),
        });
    }
    let q = params.quorum();
    if vs.len() < q {
        return Err(Error::TooFewVectors {
            what: "enumerate_s_geo",
            needed: q,
            got: vs.len(),
        });
    }
    let subset_indices: Vec<Vec<usize>> = Combinations::new(vs.len(), q).collect();
    // collect() keeps the lexicographic order whatever the scheduling
    let medians = subset_indices
        .par_iter()
        .map(|idx| geometric_median(&pick(vs, idx), cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(GeoMedianSet {
        medians,
        subset_indices,
    })
}

/// Smallest hyperbox containing every subset median.
pub fn geo_hyperbox(vs: &[Vector], params: &SystemParams, cfg: &WeiszfeldConfig) -> Result<Hyperbox> {
    Hyperbox::bounding(&enumerate_s_geo(vs, params, cfg)?.medians)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn no_byzantine_tolerance_gives_one_median() {
        let p = SystemParams::new(3, 0, 0, 2).unwrap();
        let vs = vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        let s = enumerate_s_geo(&vs, &p, &WeiszfeldConfig::default()).unwrap();
        assert_eq!(s.medians.len(), 1);
        assert_eq!(s.subset_indices, vec![vec![0, 1, 2]]);
        let gh = geo_hyperbox(&vs, &p, &WeiszfeldConfig::default()).unwrap();
        assert_eq!(gh.e_max(), 0.0);
    }

    #[test]
    fn pair_midpoints_on_a_line() {
        // subsets of size two; enumeration itself does not need 3t < n
        let p = SystemParams { n: 3, t: 1, f: 0, d: 1 };
        let vs: Vec<Vector> = [0.0, 1.0, 2.0].iter().map(|&x| v(&[x])).collect();
        let s = enumerate_s_geo(&vs, &p, &WeiszfeldConfig::default()).unwrap();
        let got: Vec<f64> = s.medians.iter().map(|m| m[0]).collect();
        assert_eq!(got, vec![0.5, 1.0, 1.5]);
    }

    #[test]
    fn identical_inputs_degenerate_box() {
        let p = SystemParams::new(7, 2, 0, 3).unwrap();
        let vs = vec![v(&[1.0, 2.0, 3.0]); 7];
        let gh = geo_hyperbox(&vs, &p, &WeiszfeldConfig::default()).unwrap();
        assert_eq!(gh, Hyperbox::point(&vs[0]));
    }

    #[test]
    fn capacity_bound() {
        let p = SystemParams::new(16, 5, 0, 1).unwrap();
        let vs = vec![v(&[0.0]); 16];
        assert!(matches!(
            enumerate_s_geo(&vs, &p, &WeiszfeldConfig::default()),
            Err(Error::Capacity { limit: 15, .. })
        ));
    }
}
