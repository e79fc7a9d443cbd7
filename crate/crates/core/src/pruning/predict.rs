//! Closed-form EC of landmark-SLAM graphs in which every landmark is seen
//! from every pose, evaluated with exact integer arithmetic.
//!
//! `n_x / r` is rounded up: a partial final stride still contributes a pose.

use crate::error::{Error, Result};
use crate::Ec;

fn checked(terms: &[u64]) -> Result<Ec> {
    terms
        .iter()
        .try_fold(1u64, |acc, &t| acc.checked_mul(t))
        .ok_or(Error::Overflow("predicted elimination complexity"))
}

fn kept_poses(n_x: u64, r: u64) -> Result<u64> {
    if r == 0 {
        return Err(Error::InvalidConfig(
            "pruning rate must be at least 1".into(),
        ));
    }
    Ok(n_x.div_ceil(r))
}

/// `(d_l n_l + d_x n_x) (d_x n_x)^2`
pub fn predicted_ec_full(n_x: u64, n_l: u64, d_x: u64, d_l: u64) -> Result<Ec> {
    predicted_ec_keyframe(n_x, n_l, d_x, d_l, 1)
}

/// `(d_l n_l + d_x n_x / r) (d_x n_x / r)^2`
pub fn predicted_ec_keyframe(n_x: u64, n_l: u64, d_x: u64, d_l: u64, r: u64) -> Result<Ec> {
    let m = kept_poses(n_x, r)?;
    let pose_block = d_x
        .checked_mul(m)
        .ok_or(Error::Overflow("predicted elimination complexity"))?;
    let width = d_l
        .checked_mul(n_l)
        .and_then(|l| l.checked_add(pose_block))
        .ok_or(Error::Overflow("predicted elimination complexity"))?;
    checked(&[width, pose_block, pose_block])
}

/// `(n_l d_l + 9 n_x d_x) (d_x n_x / r)^2`
pub fn predicted_ec_decimate(n_x: u64, n_l: u64, d_x: u64, d_l: u64, r: u64) -> Result<Ec> {
    let m = kept_poses(n_x, r)?;
    let pose_block = d_x
        .checked_mul(m)
        .ok_or(Error::Overflow("predicted elimination complexity"))?;
    let width = n_l
        .checked_mul(d_l)
        .zip(n_x.checked_mul(d_x).and_then(|p| p.checked_mul(9)))
        .and_then(|(a, b)| a.checked_add(b))
        .ok_or(Error::Overflow("predicted elimination complexity"))?;
    checked(&[width, pose_block, pose_block])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_direct_evaluation() {
        assert_eq!(predicted_ec_full(10, 20, 1, 1).unwrap(), 3000);
    }

    #[test]
    fn keyframe_rate_one_is_full() {
        for (nx, nl) in [(10, 20), (7, 3), (120, 240)] {
            assert_eq!(
                predicted_ec_keyframe(nx, nl, 6, 3, 1).unwrap(),
                predicted_ec_full(nx, nl, 6, 3).unwrap()
            );
        }
    }

    #[test]
    fn partial_stride_rounds_up() {
        // 10 poses at rate 3 keep frames 0, 3, 6, 9
        assert_eq!(predicted_ec_keyframe(10, 0, 1, 1, 3).unwrap(), 64);
    }

    #[test]
    fn decimation_ratio_tends_to_nine_over_r_squared() {
        // with the landmark count held fixed the pose term dominates
        let (nx, nl) = (1000u64, 50u64);
        for r in [2u64, 3, 4, 5, 6, 8, 10] {
            let ratio = predicted_ec_decimate(nx, nl, 6, 3, r).unwrap() as f64
                / predicted_ec_full(nx, nl, 6, 3).unwrap() as f64;
            let limit = 9.0 / (r * r) as f64;
            assert!(
                (ratio / limit - 1.0).abs() < 0.03,
                "r={r}: {ratio} vs {limit}"
            );
        }
    }

    #[test]
    fn decimation_ratio_with_proportional_landmarks() {
        // n_l = c n_x: the limit is (c d_l + 9 d_x) / (c d_l + d_x) / r^2
        let (nx, c, dx, dl) = (1000u64, 2u64, 6u64, 3u64);
        for r in [2u64, 4, 8] {
            let ratio = predicted_ec_decimate(nx, c * nx, dx, dl, r).unwrap() as f64
                / predicted_ec_full(nx, c * nx, dx, dl).unwrap() as f64;
            let limit = ((c * dl + 9 * dx) as f64 / (c * dl + dx) as f64) / (r * r) as f64;
            assert!(
                (ratio / limit - 1.0).abs() < 1e-2,
                "r={r}: {ratio} vs {limit}"
            );
        }
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(
            predicted_ec_full(u64::MAX / 2, 1, 6, 3),
            Err(Error::Overflow(_))
        ));
        assert!(predicted_ec_keyframe(4, 4, 1, 1, 0).is_err());
    }
}
