use crate::error::Result;
use crate::sim::ObservationLog;

use super::{check_rate, Policy, PruneResult};

/// Keeps frames whose index is a multiple of `rate`, with all of their
/// observations; everything seen at other frames is dropped. Odometry between
/// kept frames is composed implicitly by [`crate::sim::build_graph`].
pub fn prune_keyframe(log: &ObservationLog, rate: usize) -> Result<PruneResult> {
    check_rate(rate)?;
    let filtered = ObservationLog {
        frames: log
            .frames
            .iter()
            .filter(|f| f.index % rate == 0)
            .cloned()
            .collect(),
        landmark_count: log.landmark_count,
    };
    Ok(PruneResult::new(log, filtered, Policy::Keyframe, rate))
}
