use crate::error::{Error, Result};
use crate::vector::{common_dim, Vector};

/// Largest input count accepted by the exhaustive search.
pub const MAX_MIN_DIAMETER_INPUTS: usize = 20;

struct Search {
    dist: Vec<Vec<f64>>,
    size: usize,
    /// diameter bound: subsets strictly above are pruned
    bound: f64,
    collect_within: Option<f64>,
    best: Option<(f64, Vec<usize>)>,
    all: Vec<Vec<usize>>,
}

impl Search {
    fn dfs(&mut self, chosen: &mut Vec<usize>, next: usize, diam: f64) {
        if chosen.len() == self.size {
            match self.collect_within {
                Some(tol) => {
                    if diam <= self.bound + tol {
                        self.all.push(chosen.clone());
                    }
                }
                None => {
                    if self.best.as_ref().is_none_or(|(b, _)| diam < *b) {
                        self.bound = diam;
                        self.best = Some((diam, chosen.clone()));
                    }
                }
            }
            return;
        }
        let n = self.dist.len();
        let remaining = self.size - chosen.len();
        for i in next..=n - remaining {
            let grown = chosen.iter().fold(diam, |acc, &j| acc.max(self.dist[i][j]));
            let prune = match self.collect_within {
                Some(tol) => grown > self.bound + tol,
                // an equal diameter can never replace the earlier minimizer
                None => self.best.is_some() && grown >= self.bound,
            };
            if prune {
                continue;
            }
            chosen.push(i);
            self.dfs(chosen, i + 1, grown);
            chosen.pop();
        }
    }
}

fn setup(vs: &[Vector], size: usize) -> Result<Vec<Vec<f64>>> {
    common_dim(vs).map_err(|e| match e {
        Error::Empty(_) => Error::Empty("min_diameter_subset"),
        e => e,
    })?;
    if vs.len() > MAX_MIN_DIAMETER_INPUTS {
        return Err(Error::Capacity {
            what: "min_diameter_subset",
            limit: MAX_MIN_DIAMETER_INPUTS,
            got: vs.len(),
        });
    }
    if size == 0 || size > vs.len() {
        return Err(Error::TooFewVectors {
            what: "min_diameter_subset",
            needed: size.max(1),
            got: vs.len(),
        });
    }
    Ok(vs.iter().map(|a| vs.iter().map(|b| a.dist(b)).collect()).collect())
}

/// Index set of `size` vectors with minimal diameter; the lexicographically
/// smallest one among exact ties.
pub fn min_diameter_subset(vs: &[Vector], size: usize) -> Result<Vec<usize>> {
    let dist = setup(vs, size)?;
    let mut s = Search {
        dist,
        size,
        bound: f64::INFINITY,
        collect_within: None,
        best: None,
        all: Vec::new(),
    };
    s.dfs(&mut Vec::with_capacity(size), 0, 0.0);
    Ok(s.best.expect("at least one subset exists").1)
}

/// Every `size`-subset whose diameter is within `tol` of the minimum, in
/// lexicographic order, together with the minimal diameter.
pub fn min_diameter_subsets(vs: &[Vector], size: usize, tol: f64) -> Result<(f64, Vec<Vec<usize>>)> {
    let best = min_diameter_subset(vs, size)?;
    let best_diam = subset_diameter(vs, &best);
    let mut s = Search {
        dist: setup(vs, size)?,
        size,
        bound: best_diam,
        collect_within: Some(tol),
        best: None,
        all: Vec::new(),
    };
    s.dfs(&mut Vec::with_capacity(size), 0, 0.0);
    Ok((best_diam, s.all))
}

pub fn subset_diameter(vs: &[Vector], idx: &[usize]) -> f64 {
    let mut best = 0.0f64;
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            best = best.max(vs[i].dist(&vs[j]));
        }
    }
    best
}
