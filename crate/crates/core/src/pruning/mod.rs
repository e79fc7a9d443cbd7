//! Measurement selection policies over [`ObservationLog`]s, and closed-form
//! EC predictions for keyframing and decimation.
//!
//! Only pose-landmark observations are ever removed. Odometry is implicit in
//! the log (consecutive retained frames are linked), so it is never pruned.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sim::ObservationLog;

pub mod decimate;
pub mod keyframe;
pub mod predict;
pub mod random;
pub mod tgreedy;

pub use decimate::{
    decimation_offsets, prune_decimate, prune_decimate_with_offsets, DecimationOffsets,
};
pub use keyframe::prune_keyframe;
pub use predict::{predicted_ec_decimate, predicted_ec_full, predicted_ec_keyframe};
pub use random::prune_random;
pub use tgreedy::prune_tgreedy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Policy {
    #[serde(rename = "full")]
    Full,
    #[serde(rename = "rand")]
    Random,
    #[serde(rename = "tgreedy")]
    TreeGreedy,
    #[serde(rename = "kf")]
    Keyframe,
    #[serde(rename = "dec")]
    Decimate,
}

impl Policy {
    pub const ALL: [Policy; 5] = [
        Policy::Full,
        Policy::Random,
        Policy::TreeGreedy,
        Policy::Keyframe,
        Policy::Decimate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Full => "full",
            Policy::Random => "rand",
            Policy::TreeGreedy => "tgreedy",
            Policy::Keyframe => "kf",
            Policy::Decimate => "dec",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Policy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                format!("unknown policy `{s}` (expected full, rand, tgreedy, kf or dec)")
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PruneResult {
    pub log: ObservationLog,
    pub retained: usize,
    pub removed: usize,
    pub policy: Policy,
    pub rate: usize,
}

impl PruneResult {
    pub(crate) fn new(
        original: &ObservationLog,
        log: ObservationLog,
        policy: Policy,
        rate: usize,
    ) -> Self {
        let retained = log.observation_count();
        Self {
            removed: original.observation_count() - retained,
            retained,
            log,
            policy,
            rate,
        }
    }
}

/// Applies `policy` at pruning rate `rate`; `seed` only affects `rand`.
pub fn prune(log: &ObservationLog, policy: Policy, rate: usize, seed: u64) -> Result<PruneResult> {
    match policy {
        Policy::Full => Ok(PruneResult::new(log, log.clone(), Policy::Full, 1)),
        Policy::Random => prune_random(log, rate, seed),
        Policy::TreeGreedy => prune_tgreedy(log, rate),
        Policy::Keyframe => prune_keyframe(log, rate),
        Policy::Decimate => prune_decimate(log, rate),
    }
}

pub(crate) fn check_rate(rate: usize) -> Result<()> {
    if rate == 0 {
        return Err(crate::Error::InvalidConfig(
            "pruning rate must be at least 1".into(),
        ));
    }
    Ok(())
}
