use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};

/// Feature dimension of the synthetic blobs.
pub const BLOB_DIM: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: Vec<f64>,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    pub num_features: usize,
    pub num_classes: usize,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>, num_classes: usize) -> Result<Self> {
        let first = samples.first().ok_or_else(|| Error::Dataset("no samples".into()))?;
        let num_features = first.features.len();
        if num_features == 0 {
            return Err(Error::Dataset("samples have no features".into()));
        }
        for (i, s) in samples.iter().enumerate() {
            if s.features.len() != num_features {
                return Err(Error::Dataset(format!(
                    "sample {i} has {} features, expected {num_features}",
                    s.features.len()
                )));
            }
            if s.label >= num_classes {
                return Err(Error::Dataset(format!("sample {i} has label {} >= {num_classes}", s.label)));
            }
        }
        Ok(Dataset {
            samples,
            num_features,
            num_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Shuffles and splits into `(train, test)` with `train_fraction` of the
    /// samples in the first part.
    pub fn train_test_split(&self, train_fraction: f64, seed: u64) -> Result<(Vec<Sample>, Vec<Sample>)> {
        if !(0.0..1.0).contains(&train_fraction) || train_fraction == 0.0 {
            return Err(Error::InvalidParams(format!(
                "train fraction must lie in (0, 1), got {train_fraction}"
            )));
        }
        let mut s = self.samples.clone();
        s.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let cut = ((s.len() as f64) * train_fraction).round() as usize;
        let test = s.split_off(cut.clamp(1, s.len().saturating_sub(1).max(1)));
        Ok((s, test))
    }
}

/// Isotropic Gaussian clusters in `R^16` with centres drawn from `N(0, I)`.
pub fn generate_blobs(num_classes: usize, per_class: usize, spread: f64, seed: u64) -> Result<Dataset> {
    generate_blobs_in(BLOB_DIM, num_classes, per_class, spread, seed)
}

pub fn generate_blobs_in(dim: usize, num_classes: usize, per_class: usize, spread: f64, seed: u64) -> Result<Dataset> {
    if dim == 0 || num_classes < 2 || per_class == 0 {
        return Err(Error::Dataset(format!(
            "blobs need dim >= 1, at least 2 classes and per_class >= 1 (got {dim}, {num_classes}, {per_class})"
        )));
    }
    if !spread.is_finite() || spread < 0.0 {
        return Err(Error::Dataset(format!("spread must be finite and non-negative, got {spread}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centres: Vec<Vec<f64>> = (0..num_classes)
        .map(|_| (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();
    let noise = Normal::new(0.0, spread.max(f64::MIN_POSITIVE)).expect("valid std");
    let mut samples = Vec::with_capacity(num_classes * per_class);
    for (label, c) in centres.iter().enumerate() {
        for _ in 0..per_class {
            let features = c
                .iter()
                .map(|&m| if spread == 0.0 { m } else { m + noise.sample(&mut rng) })
                .collect();
            samples.push(Sample { features, label });
        }
    }
    Dataset::new(samples, num_classes)
}

/// Reads rows `label,feat0,feat1,…` and divides every feature by
/// `max_value`. The class count is the largest label plus one.
pub fn load_csv_dataset(path: &Path, max_value: f64) -> Result<Dataset> {
    if !max_value.is_finite() || max_value <= 0.0 {
        return Err(Error::InvalidParams(format!("max value must be positive, got {max_value}")));
    }
    let text = fs::read_to_string(path)?;
    parse_csv_dataset(&text, max_value)
}

pub fn parse_csv_dataset(text: &str, max_value: f64) -> Result<Dataset> {
    let mut samples = Vec::new();
    let mut width = None;
    for (i, line) in text.lines().enumerate() {
        let row = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let label_field = fields.next().unwrap_or_default().trim();
        let label: usize = label_field.parse().map_err(|_| Error::MalformedRow {
            row,
            reason: format!("label {label_field:?} is not a non-negative integer"),
        })?;
        let features = fields
            .enumerate()
            .map(|(j, f)| {
                let x: f64 = f.trim().parse().map_err(|_| Error::MalformedRow {
                    row,
                    reason: format!("feature {j} {f:?} is not a number"),
                })?;
                if !x.is_finite() {
                    return Err(Error::MalformedRow {
                        row,
                        reason: format!("feature {j} is not finite"),
                    });
                }
                Ok(x / max_value)
            })
            .collect::<Result<Vec<f64>>>()?;
        if features.is_empty() {
            return Err(Error::MalformedRow {
                row,
                reason: "no features".into(),
            });
        }
        match width {
            None => width = Some(features.len()),
            Some(w) if w != features.len() => {
                return Err(Error::MalformedRow {
                    row,
                    reason: format!("{} features, expected {w}", features.len()),
                })
            }
            Some(_) => {}
        }
        samples.push(Sample { features, label });
    }
    if samples.is_empty() {
        return Err(Error::Dataset("CSV file has no rows".into()));
    }
    let num_classes = samples.iter().map(|s| s.label).max().expect("nonempty") + 1;
    Dataset::new(samples, num_classes.max(2))
}

/// Writes the dataset in the format read by [`load_csv_dataset`] with
/// `max_value = 1`, using round-trip float formatting.
pub fn write_csv_dataset(path: &Path, data: &Dataset) -> Result<()> {
    let mut out = String::new();
    for s in &data.samples {
        write!(out, "{}", s.label).expect("write to string");
        for x in &s.features {
            write!(out, ",{x:?}").expect("write to string");
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_row_file() {
        let d = parse_csv_dataset("3,0,255\n", 255.0).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.samples[0].label, 3);
        assert_eq!(d.samples[0].features, vec![0.0, 1.0]);
    }

    #[test]
    fn malformed_rows_report_row_number() {
        assert!(matches!(parse_csv_dataset("", 1.0), Err(Error::Dataset(_))));
        assert_eq!(
            parse_csv_dataset("1,2\n0,x\n", 1.0).unwrap_err(),
            Error::MalformedRow {
                row: 2,
                reason: "feature 0 \"x\" is not a number".into()
            }
        );
        assert!(matches!(
            parse_csv_dataset("1,2\n0,1,3\n", 1.0),
            Err(Error::MalformedRow { row: 2, .. })
        ));
        assert!(matches!(parse_csv_dataset("-1,2\n", 1.0), Err(Error::MalformedRow { row: 1, .. })));
    }

    #[test]
    fn csv_round_trip() {
        let d = generate_blobs(3, 4, 0.7, 5).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("blobs.csv");
        write_csv_dataset(&path, &d).unwrap();
        assert_eq!(load_csv_dataset(&path, 1.0).unwrap(), d);
    }

    #[test]
    fn blobs_are_deterministic() {
        assert_eq!(generate_blobs(4, 10, 0.5, 1).unwrap(), generate_blobs(4, 10, 0.5, 1).unwrap());
        assert_ne!(generate_blobs(4, 10, 0.5, 1).unwrap(), generate_blobs(4, 10, 0.5, 2).unwrap());
        assert!(generate_blobs(4, 0, 0.5, 1).is_err());
        let d = generate_blobs(10, 200, 1.0, 0).unwrap();
        assert_eq!((d.len(), d.num_features, d.num_classes), (2000, 16, 10));
    }

    #[test]
    fn split_sizes() {
        let d = generate_blobs(10, 200, 1.0, 0).unwrap();
        let (train, test) = d.train_test_split(0.9, 3).unwrap();
        assert_eq!((train.len(), test.len()), (1800, 200));
    }
}
