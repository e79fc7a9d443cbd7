use std::collections::BTreeSet;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::sim::{Frame, ObservationLog};

use super::decimate::prune_decimate;
use super::{check_rate, Policy, PruneResult};

/// Uniformly random observations, count-matched to decimation at the same
/// rate. Each landmark's first observation is always kept so that the same
/// landmarks can initialize as under decimation.
pub fn prune_random(log: &ObservationLog, rate: usize, seed: u64) -> Result<PruneResult> {
    check_rate(rate)?;
    let budget = prune_decimate(log, rate)?.retained;
    let first = log.first_observation();

    let mut keep: BTreeSet<(usize, usize)> = first
        .iter()
        .enumerate()
        .filter_map(|(l, f)| f.map(|i| (i, l)))
        .collect();
    let rest: Vec<(usize, usize)> = log
        .observations()
        .filter(|&(i, l)| first[l] != Some(i))
        .collect();
    let extra = budget.saturating_sub(keep.len()).min(rest.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    keep.extend(
        index::sample(&mut rng, rest.len(), extra)
            .into_iter()
            .map(|k| rest[k]),
    );

    let filtered = ObservationLog {
        frames: log
            .frames
            .iter()
            .map(|f| Frame {
                index: f.index,
                observations: f
                    .observations
                    .iter()
                    .copied()
                    .filter(|&l| keep.contains(&(f.index, l)))
                    .collect(),
            })
            .collect(),
        landmark_count: log.landmark_count,
    };
    Ok(PruneResult::new(log, filtered, Policy::Random, rate))
}
