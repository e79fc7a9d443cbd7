//! Landmark-SLAM graph generators and a seeded observation simulator.
//!
//! The simulator only produces visibility: which landmarks each frame sees.
//! Pruning policies filter the resulting [`ObservationLog`], and
//! [`build_graph`] turns any (filtered) log into a factor graph.

use std::f64::consts::PI;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{FactorGraph, VarKind};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub amplitude: f64,
    pub wavelength: f64,
    /// Forward distance travelled between frames.
    pub step: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Visibility {
    pub max_range: f64,
    /// Full angular width of the forward-facing sensor, radians.
    pub field_of_view: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_frames: usize,
    pub trajectory: Trajectory,
    pub landmark_count: usize,
    pub landmark_region: Region,
    pub visibility: Visibility,
    pub min_obs_to_init: usize,
    pub pose_dim: usize,
    pub landmark_dim: usize,
    pub seed: u64,
}

impl SimConfig {
    /// The desk-scale scenario used by the experiment defaults: 150 frames
    /// along one sinusoid period, 80 landmarks, SE(3)-sized poses and point
    /// landmarks, and a 90 degree sensor reaching twice the wavelength.
    pub fn desk_scale(seed: u64) -> Self {
        let wavelength = 150.0;
        Self {
            n_frames: 150,
            trajectory: Trajectory {
                amplitude: 12.0,
                wavelength,
                step: 1.0,
            },
            landmark_count: 80,
            landmark_region: Region {
                x_min: 0.0,
                x_max: 150.0,
                y_min: -30.0,
                y_max: 30.0,
            },
            visibility: Visibility {
                max_range: 2.0 * wavelength,
                field_of_view: PI / 2.0,
            },
            min_obs_to_init: 2,
            pose_dim: 6,
            landmark_dim: 3,
            seed,
        }
    }

    pub fn graph_params(&self) -> GraphParams {
        GraphParams {
            pose_dim: self.pose_dim,
            landmark_dim: self.landmark_dim,
            min_obs_to_init: self.min_obs_to_init,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.n_frames < 2 {
            return bad("n_frames must be at least 2");
        }
        if self.min_obs_to_init < 2 {
            return bad("min_obs_to_init must be at least 2");
        }
        if self.pose_dim == 0 || self.landmark_dim == 0 {
            return bad("variable dimensions must be at least 1");
        }
        let r = &self.landmark_region;
        if !(r.x_max > r.x_min && r.y_max > r.y_min) {
            return bad("landmark_region has zero area");
        }
        let t = &self.trajectory;
        if !(t.wavelength > 0.0 && t.step > 0.0 && t.amplitude.is_finite()) {
            return bad("trajectory needs positive wavelength and step");
        }
        if self.visibility.max_range < 0.0 || self.visibility.field_of_view < 0.0 {
            return bad("visibility range and field of view must be non-negative");
        }
        Ok(())
    }
}

/// Dimensions and initialization threshold used when turning a log into a graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphParams {
    pub pose_dim: usize,
    pub landmark_dim: usize,
    pub min_obs_to_init: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    /// Index in the raw frame stream; keyframing leaves gaps.
    pub index: usize,
    /// Landmark ids observed at this frame, ascending.
    pub observations: Vec<usize>,
}

/// Time-ordered frames and the landmarks observed at each. Every frame after
/// the first in the log carries an (implicit) odometry link to its
/// predecessor in the log.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObservationLog {
    pub frames: Vec<Frame>,
    pub landmark_count: usize,
}

impl ObservationLog {
    pub fn observation_count(&self) -> usize {
        self.frames.iter().map(|f| f.observations.len()).sum()
    }

    /// `(frame index, landmark)` pairs in log order.
    pub fn observations(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.frames
            .iter()
            .flat_map(|f| f.observations.iter().map(move |&l| (f.index, l)))
    }

    /// Frame index of each landmark's first observation.
    pub fn first_observation(&self) -> Vec<Option<usize>> {
        let mut first = vec![None; self.landmark_count];
        for (frame, l) in self.observations() {
            first[l].get_or_insert(frame);
        }
        first
    }

    pub fn contains(&self, frame: usize, landmark: usize) -> bool {
        self.frames
            .binary_search_by_key(&frame, |f| f.index)
            .map(|i| self.frames[i].observations.binary_search(&landmark).is_ok())
            .unwrap_or(false)
    }

    /// Frames with index at most `last_frame`.
    pub fn prefix(&self, last_frame: usize) -> ObservationLog {
        ObservationLog {
            frames: self
                .frames
                .iter()
                .take_while(|f| f.index <= last_frame)
                .cloned()
                .collect(),
            landmark_count: self.landmark_count,
        }
    }

    /// `LANDMARKS <n>` header, then `FRAME <idx>` records each followed by
    /// `OBS <landmark>` lines.
    pub fn write_to(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "LANDMARKS {}", self.landmark_count)?;
        for f in &self.frames {
            writeln!(out, "FRAME {}", f.index)?;
            for l in &f.observations {
                writeln!(out, "OBS {l}")?;
            }
        }
        Ok(())
    }

    pub fn read_from(input: impl Read) -> Result<Self> {
        let mut log = ObservationLog {
            frames: Vec::new(),
            landmark_count: 0,
        };
        let mut declared = None;
        for (idx, line) in BufReader::new(input).lines().enumerate() {
            let line = line?;
            let err = |message: String| Error::Parse {
                line: idx + 1,
                message,
            };
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut fields = content.split_whitespace();
            let tag = fields.next().unwrap_or_default();
            let value: usize = fields
                .next()
                .ok_or_else(|| err(format!("{tag} record needs a value")))?
                .parse()
                .map_err(|_| err("expected a non-negative integer".into()))?;
            if fields.next().is_some() {
                return Err(err("trailing fields".into()));
            }
            match tag {
                "LANDMARKS" => declared = Some(value),
                "FRAME" => {
                    if log.frames.last().is_some_and(|f| f.index >= value) {
                        return Err(err("frame indices must increase".into()));
                    }
                    log.frames.push(Frame {
                        index: value,
                        observations: Vec::new(),
                    });
                }
                "OBS" => {
                    let frame = log
                        .frames
                        .last_mut()
                        .ok_or_else(|| err("OBS before any FRAME".into()))?;
                    if frame.observations.last().is_some_and(|&l| l >= value) {
                        return Err(err("observations within a frame must be ascending".into()));
                    }
                    frame.observations.push(value);
                    log.landmark_count = log.landmark_count.max(value + 1);
                }
                other => return Err(err(format!("unknown record type `{other}`"))),
            }
        }
        if let Some(n) = declared {
            if n < log.landmark_count {
                return Err(Error::Parse {
                    line: 1,
                    message: format!(
                        "LANDMARKS {n} but landmark {} observed",
                        log.landmark_count - 1
                    ),
                });
            }
            log.landmark_count = n;
        }
        Ok(log)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(fs::File::create(path)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(fs::File::open(path)?)
    }
}

/// `n_x` poses chained by odometry and `n_l` landmarks, each observed from
/// every pose. Poses take ids `0..n_x`, landmarks follow.
pub fn worst_case_graph(n_x: usize, n_l: usize, d_x: usize, d_l: usize) -> Result<FactorGraph> {
    if n_x == 0 {
        return Err(Error::InvalidConfig(
            "worst-case graph needs at least one pose".into(),
        ));
    }
    let mut g = FactorGraph::new();
    for _ in 0..n_x {
        g.add_variable(VarKind::Pose, d_x)?;
    }
    for _ in 0..n_l {
        g.add_variable(VarKind::Landmark, d_l)?;
    }
    for i in 1..n_x {
        g.add_factor(&[i - 1, i])?;
    }
    for i in 0..n_x {
        for j in 0..n_l {
            g.add_factor(&[i, n_x + j])?;
        }
    }
    Ok(g)
}

/// Every one of `n_frames` frames observes all `n_landmarks` landmarks.
pub fn worst_case_log(n_frames: usize, n_landmarks: usize) -> ObservationLog {
    ObservationLog {
        frames: (0..n_frames)
            .map(|index| Frame {
                index,
                observations: (0..n_landmarks).collect(),
            })
            .collect(),
        landmark_count: n_landmarks,
    }
}

/// Ground-truth planar pose of frame `i`: position and heading.
pub fn ground_truth_pose(traj: &Trajectory, i: usize) -> (f64, f64, f64) {
    let x = i as f64 * traj.step;
    let k = 2.0 * PI / traj.wavelength;
    let y = traj.amplitude * (k * x).sin();
    let heading = (traj.amplitude * k * (k * x).cos()).atan();
    (x, y, heading)
}

/// Landmark positions drawn uniformly in the configured region.
pub fn landmark_positions(config: &SimConfig) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let r = &config.landmark_region;
    (0..config.landmark_count)
        .map(|_| {
            (
                rng.gen_range(r.x_min..r.x_max),
                rng.gen_range(r.y_min..r.y_max),
            )
        })
        .collect()
}

fn wrap_angle(a: f64) -> f64 {
    let t = (a + PI).rem_euclid(2.0 * PI) - PI;
    if t == -PI {
        PI
    } else {
        t
    }
}

pub fn simulate_trajectory(config: &SimConfig) -> Result<ObservationLog> {
    config.validate()?;
    let landmarks = landmark_positions(config);
    let vis = &config.visibility;
    let frames = (0..config.n_frames)
        .map(|index| {
            let (px, py, heading) = ground_truth_pose(&config.trajectory, index);
            let observations = landmarks
                .iter()
                .enumerate()
                .filter(|(_, &(lx, ly))| {
                    let (dx, dy) = (lx - px, ly - py);
                    let range = dx.hypot(dy);
                    if range > vis.max_range {
                        return false;
                    }
                    vis.field_of_view >= 2.0 * PI
                        || wrap_angle(dy.atan2(dx) - heading).abs() <= vis.field_of_view / 2.0
                })
                .map(|(l, _)| l)
                .collect();
            Frame {
                index,
                observations,
            }
        })
        .collect();
    Ok(ObservationLog {
        frames,
        landmark_count: config.landmark_count,
    })
}

/// Landmarks initialized by the log: those with at least `min_obs_to_init`
/// observations, in order of the frame at which they reach the threshold
/// (ties by landmark id).
pub fn initialized_landmarks(log: &ObservationLog, min_obs_to_init: usize) -> Vec<usize> {
    let mut seen = vec![0usize; log.landmark_count];
    let mut init = Vec::new();
    for frame in &log.frames {
        for &l in &frame.observations {
            seen[l] += 1;
            if seen[l] == min_obs_to_init.max(1) {
                init.push(l);
            }
        }
    }
    init
}

/// One pose per frame in the log, odometry between consecutive frames, and
/// one binary factor per observation of each initialized landmark.
///
/// Poses take ids first (in frame order), then landmarks in initialization
/// order. Odometry factors come first, then observations by frame and
/// landmark id.
pub fn build_graph(log: &ObservationLog, params: &GraphParams) -> Result<FactorGraph> {
    let mut g = FactorGraph::new();
    for _ in &log.frames {
        g.add_variable(VarKind::Pose, params.pose_dim)?;
    }
    let mut landmark_var = vec![None; log.landmark_count];
    for l in initialized_landmarks(log, params.min_obs_to_init) {
        landmark_var[l] = Some(g.add_variable(VarKind::Landmark, params.landmark_dim)?);
    }
    for i in 1..log.frames.len() {
        g.add_factor(&[i - 1, i])?;
    }
    for (pose, frame) in log.frames.iter().enumerate() {
        for &l in &frame.observations {
            if let Some(v) = landmark_var[l] {
                g.add_factor(&[pose, v])?;
            }
        }
    }
    Ok(g)
}

/// Graph of the log restricted to frames with index at most `last_frame`.
pub fn build_graph_prefix(
    log: &ObservationLog,
    params: &GraphParams,
    last_frame: usize,
) -> Result<FactorGraph> {
    build_graph(&log.prefix(last_frame), params)
}
