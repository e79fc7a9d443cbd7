//! Greedy tree-connectivity measurement selection.
//!
//! The spanning-tree count of a connected graph is the determinant of its
//! reduced Laplacian (any one vertex grounded). Adding edge `(u, v)` scales
//! that determinant by `1 + r(u, v)`, where `r` is the effective resistance
//! between the endpoints, so the greedy step picks the candidate with the
//! largest resistance and then applies a Sherman-Morrison update to the
//! inverse reduced Laplacian.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sim::{Frame, ObservationLog};

use super::decimate::prune_decimate;
use super::{check_rate, Policy, PruneResult};

/// In-place lower Cholesky of a dense row-major `n x n` SPD matrix.
fn cholesky_in_place<T: Scalar>(a: &mut [T], n: usize) -> Result<()> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if d <= T::zero() || !d.is_finite() {
            return Err(Error::Numerical(format!(
                "reduced Laplacian not positive definite at row {j} (graph disconnected or ill-conditioned)"
            )));
        }
        let ljj = d.sqrt();
        a[j * n + j] = ljj;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / ljj;
        }
        for k in j + 1..n {
            a[j * n + k] = T::zero();
        }
    }
    Ok(())
}

fn reduced_laplacian<T: Scalar>(n: usize, edges: &[(usize, usize)]) -> Vec<T> {
    let m = n - 1;
    let mut lap = vec![T::zero(); m * m];
    for &(u, v) in edges {
        for (a, b) in [(u, v), (v, u)] {
            if a > 0 {
                lap[(a - 1) * m + (a - 1)] += T::one();
                if b > 0 {
                    lap[(a - 1) * m + (b - 1)] -= T::one();
                }
            }
        }
    }
    lap
}

/// Natural log of the number of spanning trees of a connected simple graph on
/// vertices `0..n`.
pub fn log_spanning_tree_count<T: Scalar>(n: usize, edges: &[(usize, usize)]) -> Result<T> {
    if n <= 1 {
        return Ok(T::zero());
    }
    let m = n - 1;
    let mut lap = reduced_laplacian::<T>(n, edges);
    cholesky_in_place(&mut lap, m)?;
    Ok((0..m).fold(T::zero(), |acc, i| acc + lap[i * m + i].ln()) * T::of(2.0))
}

/// Inverse reduced Laplacian of a growing graph, with vertex 0 grounded.
#[derive(Clone, Debug)]
pub struct TreeConnectivity<T> {
    n: usize,
    inverse: Vec<T>,
    log_tree_count: T,
}

impl<T: Scalar> TreeConnectivity<T> {
    /// `edges` must connect all `n` vertices.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n <= 1 {
            return Ok(Self {
                n,
                inverse: Vec::new(),
                log_tree_count: T::zero(),
            });
        }
        let m = n - 1;
        let mut l = reduced_laplacian::<T>(n, edges);
        cholesky_in_place(&mut l, m)?;
        let log_tree_count = (0..m).fold(T::zero(), |acc, i| acc + l[i * m + i].ln()) * T::of(2.0);
        // Solve L L^T X = I one column at a time.
        let mut inverse = vec![T::zero(); m * m];
        let mut col = vec![T::zero(); m];
        for c in 0..m {
            for i in 0..m {
                let mut s = if i == c { T::one() } else { T::zero() };
                for k in 0..i {
                    s -= l[i * m + k] * col[k];
                }
                col[i] = s / l[i * m + i];
            }
            for i in (0..m).rev() {
                let mut s = col[i];
                for k in i + 1..m {
                    s -= l[k * m + i] * col[k];
                }
                col[i] = s / l[i * m + i];
            }
            for i in 0..m {
                inverse[i * m + c] = col[i];
            }
        }
        Ok(Self {
            n,
            inverse,
            log_tree_count,
        })
    }

    pub fn log_tree_count(&self) -> T {
        self.log_tree_count
    }

    fn entry(&self, a: usize, b: usize) -> T {
        if a == 0 || b == 0 {
            T::zero()
        } else {
            self.inverse[(a - 1) * (self.n - 1) + (b - 1)]
        }
    }

    pub fn effective_resistance(&self, u: usize, v: usize) -> T {
        self.entry(u, u) + self.entry(v, v) - self.entry(u, v) - self.entry(v, u)
    }

    /// Adds edge `(u, v)` and returns the increase in log tree count.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<T> {
        let m = self.n - 1;
        let sb: Vec<T> = (1..self.n)
            .map(|a| self.entry(a, u) - self.entry(a, v))
            .collect();
        let resistance = self.effective_resistance(u, v);
        let denom = T::one() + resistance;
        if denom <= T::zero() || !denom.is_finite() {
            return Err(Error::Numerical(format!(
                "rank-one update of edge ({u}, {v}) has denominator {denom}"
            )));
        }
        for i in 0..m {
            let scale = sb[i] / denom;
            for (x, &b) in self.inverse[i * m..(i + 1) * m].iter_mut().zip(&sb) {
                *x -= scale * b;
            }
        }
        let gain = denom.ln();
        self.log_tree_count += gain;
        Ok(gain)
    }
}

/// Outcome of a greedy selection, with the log tree count after the initial
/// spanning tree and after every greedy addition.
#[derive(Clone, Debug)]
pub struct GreedySelection {
    pub result: PruneResult,
    pub log_tree_counts: Vec<f64>,
}

/// Keeps `budget` observations: the odometry chain plus each landmark's first
/// observation form the starting spanning tree, then observations are added
/// one at a time, each maximizing the spanning-tree count.
pub fn select_tree_greedy<T: Scalar>(
    log: &ObservationLog,
    budget: usize,
) -> Result<GreedySelection> {
    let first = log.first_observation();
    let pose_of_frame = |index: usize| {
        log.frames
            .binary_search_by_key(&index, |f| f.index)
            .unwrap()
    };
    let n_poses = log.frames.len();
    let mut landmark_vertex = vec![usize::MAX; log.landmark_count];
    let mut n = n_poses;
    for (l, f) in first.iter().enumerate() {
        if f.is_some() {
            landmark_vertex[l] = n;
            n += 1;
        }
    }

    let mut keep: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut edges: Vec<(usize, usize)> = (1..n_poses).map(|i| (i - 1, i)).collect();
    for (l, f) in first.iter().enumerate() {
        if let Some(i) = *f {
            keep.insert((i, l));
            edges.push((pose_of_frame(i), landmark_vertex[l]));
        }
    }
    let mut candidates: Vec<(usize, usize)> = log
        .observations()
        .filter(|&(i, l)| first[l] != Some(i))
        .collect();

    let mut log_tree_counts = Vec::new();
    if n > 0 {
        let mut conn = TreeConnectivity::<T>::new(n, &edges)?;
        log_tree_counts.push(conn.log_tree_count().as_f64());
        while keep.len() < budget && !candidates.is_empty() {
            let mut best = 0;
            let mut best_r = T::neg_infinity();
            for (k, &(i, l)) in candidates.iter().enumerate() {
                let r = conn.effective_resistance(pose_of_frame(i), landmark_vertex[l]);
                if r > best_r {
                    best = k;
                    best_r = r;
                }
            }
            let (i, l) = candidates.remove(best);
            conn.add_edge(pose_of_frame(i), landmark_vertex[l])?;
            keep.insert((i, l));
            log_tree_counts.push(conn.log_tree_count().as_f64());
        }
    }

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
    let rate = 0;
    Ok(GreedySelection {
        result: PruneResult::new(log, filtered, Policy::TreeGreedy, rate),
        log_tree_counts,
    })
}

/// Tree-connectivity greedy, count-matched to decimation at the same rate.
pub fn prune_tgreedy(log: &ObservationLog, rate: usize) -> Result<PruneResult> {
    check_rate(rate)?;
    let budget = prune_decimate(log, rate)?.retained;
    let mut sel = select_tree_greedy::<f64>(log, budget)?;
    sel.result.rate = rate;
    Ok(sel.result)
}
