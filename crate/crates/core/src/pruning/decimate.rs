use crate::error::{Error, Result};
use crate::sim::{Frame, ObservationLog};

use super::{check_rate, Policy, PruneResult};

/// Per-landmark decimation offset `k_j` in `0..r`; `None` for landmarks that
/// are never observed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecimationOffsets {
    pub rate: usize,
    pub offsets: Vec<Option<usize>>,
}

/// Offsets from the frame index of each landmark's first observation, so the
/// first observation is always kept.
pub fn decimation_offsets(log: &ObservationLog, rate: usize) -> Result<DecimationOffsets> {
    check_rate(rate)?;
    Ok(DecimationOffsets {
        rate,
        offsets: log
            .first_observation()
            .into_iter()
            .map(|f| f.map(|i| i % rate))
            .collect(),
    })
}

/// Keeps the observation of landmark `j` at frame `i` iff `i mod r == k_j`.
pub fn prune_decimate_with_offsets(
    log: &ObservationLog,
    offsets: &DecimationOffsets,
) -> Result<PruneResult> {
    let r = offsets.rate;
    check_rate(r)?;
    if offsets.offsets.len() != log.landmark_count {
        return Err(Error::InvalidConfig(format!(
            "{} offsets for {} landmarks",
            offsets.offsets.len(),
            log.landmark_count
        )));
    }
    let frames = log
        .frames
        .iter()
        .map(|f| Frame {
            index: f.index,
            observations: f
                .observations
                .iter()
                .copied()
                .filter(|&l| offsets.offsets[l] == Some(f.index % r))
                .collect(),
        })
        .collect();
    let filtered = ObservationLog {
        frames,
        landmark_count: log.landmark_count,
    };
    Ok(PruneResult::new(log, filtered, Policy::Decimate, r))
}

pub fn prune_decimate(log: &ObservationLog, rate: usize) -> Result<PruneResult> {
    prune_decimate_with_offsets(log, &decimation_offsets(log, rate)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_landmark(frames: std::ops::Range<usize>) -> ObservationLog {
        ObservationLog {
            frames: (0..9)
                .map(|index| Frame {
                    index,
                    observations: if frames.contains(&index) {
                        vec![0]
                    } else {
                        vec![]
                    },
                })
                .collect(),
            landmark_count: 1,
        }
    }

    fn kept(r: &PruneResult) -> Vec<usize> {
        r.log.observations().map(|(i, _)| i).collect()
    }

    #[test]
    fn offset_zero_and_one() {
        assert_eq!(
            kept(&prune_decimate(&single_landmark(0..9), 3).unwrap()),
            [0, 3, 6]
        );
        assert_eq!(
            kept(&prune_decimate(&single_landmark(1..9), 3).unwrap()),
            [1, 4, 7]
        );
    }

    #[test]
    fn rate_one_is_identity() {
        let log = single_landmark(2..7);
        let r = prune_decimate(&log, 1).unwrap();
        assert_eq!(r.log, log);
        assert_eq!(r.removed, 0);
        assert!(prune_decimate(&log, 0).is_err());
    }
}
