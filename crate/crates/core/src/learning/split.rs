use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::dataset::Sample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitKind {
    #[default]
    Uniform,
    /// Per class, `n − 2` clients get `1/n` of it, one gets half that and one
    /// gets one and a half times that; the assignment rotates with the class.
    MildHeterogeneous,
    /// Label-sorted data cut into `2n` pieces, two random pieces per client.
    ExtremeTwoClass,
}

/// Partitions `train` into `clients` equal-size shards.
///
/// Shards are truncated to the smallest shard so every client holds the same
/// number of samples.
pub fn split_data(train: &[Sample], clients: usize, kind: SplitKind, seed: u64) -> Result<Vec<Vec<Sample>>> {
    if clients == 0 {
        return Err(Error::InvalidParams("need at least one client".into()));
    }
    if train.len() < clients {
        return Err(Error::Dataset(format!(
            "{} samples cannot feed {clients} clients",
            train.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shards: Vec<Vec<Sample>> = vec![Vec::new(); clients];
    match kind {
        SplitKind::Uniform => {
            let mut s = train.to_vec();
            s.shuffle(&mut rng);
            for (i, x) in s.into_iter().enumerate() {
                shards[i % clients].push(x);
            }
        }
        SplitKind::MildHeterogeneous => {
            let shares = mild_shares(clients);
            let classes = train.iter().map(|s| s.label).max().expect("nonempty") + 1;
            for c in 0..classes {
                let mut members: Vec<Sample> = train.iter().filter(|s| s.label == c).cloned().collect();
                members.shuffle(&mut rng);
                let len = members.len() as f64;
                let mut cum = 0.0;
                let mut start = 0;
                for j in 0..clients {
                    cum += shares[(j + c) % clients];
                    let end = if j + 1 == clients { members.len() } else { (cum * len).round() as usize };
                    shards[j].extend_from_slice(&members[start..end.max(start)]);
                    start = end.max(start);
                }
            }
        }
        SplitKind::ExtremeTwoClass => {
            let mut s = train.to_vec();
            // stable: equal labels keep their order
            s.sort_by_key(|x| x.label);
            let pieces = 2 * clients;
            let size = s.len() / pieces;
            if size == 0 {
                return Err(Error::Dataset(format!(
                    "{} samples cannot form {pieces} pieces",
                    s.len()
                )));
            }
            let mut order: Vec<usize> = (0..pieces).collect();
            order.shuffle(&mut rng);
            for (j, pair) in order.chunks(2).enumerate() {
                for &p in pair {
                    shards[j].extend_from_slice(&s[p * size..(p + 1) * size]);
                }
            }
        }
    }
    let min = shards.iter().map(Vec::len).min().expect("clients >= 1");
    if min == 0 {
        return Err(Error::Dataset("a client received no samples".into()));
    }
    for s in &mut shards {
        s.shuffle(&mut rng);
        s.truncate(min);
    }
    Ok(shards)
}

fn mild_shares(clients: usize) -> Vec<f64> {
    let base = 1.0 / clients as f64;
    if clients < 2 {
        return vec![1.0];
    }
    let mut s = vec![base; clients - 2];
    s.push(base / 2.0);
    s.push(base * 1.5);
    s
}
