//! Elimination complexity (EC) of block factor graphs, and the tooling to use
//! it for comparing measurement-pruning strategies in landmark SLAM.
//!
//! The crate is organized bottom-up:
//!
//! * [`graph`]: block factor graphs, their moralized variable adjacency, and a
//!   line-oriented text format.
//! * [`elimination`]: node elimination with fill tracking, block EC, Rose's
//!   multiplication count, and elimination orderings.
//! * [`clique_tree`]: multifrontal clique trees built from an elimination and
//!   their per-clique EC.
//! * [`sim`]: the worst-case landmark graph and a seeded sinusoidal-trajectory
//!   observation simulator.
//! * [`pruning`]: measurement selection policies (random, tree-greedy,
//!   keyframing, decimation) and closed-form EC predictions.
//! * [`oracle`]: a counting sparse Cholesky on synthetic SPD systems, used as
//!   independent ground truth for the symbolic counts.
//! * [`experiment`]: the grid runner behind the CLI, CSV reports and SVG plots.
//!
//! Numeric code is generic over [`Scalar`]; the `*F64` / `*F32` aliases below
//! pin the common instantiations.

pub mod clique_tree;
pub mod elimination;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod oracle;
pub mod pruning;
pub mod scalar;
pub mod sim;

pub use clique_tree::{build_clique_tree, ec_of_clique_tree, Clique, CliqueTree};
pub use elimination::{
    elimination_complexity, landmark_first_ordering, min_degree_ordering, natural_ordering,
    optimal_ordering_bruteforce, scalar_mult_count, simulate_elimination, EliminationStep,
    EliminationTrace, Ordering,
};
pub use error::{Error, Result};
pub use graph::{Adjacency, Factor, FactorGraph, FactorId, VarId, VarKind, Variable};
pub use pruning::{Policy, PruneResult};
pub use scalar::Scalar;
pub use sim::{GraphParams, ObservationLog, SimConfig};

/// Elimination complexity and multiplication counts are exact unsigned integers.
pub type Ec = u64;

pub type SparseSystemF64 = oracle::SparseSystem<f64>;
pub type SparseSystemF32 = oracle::SparseSystem<f32>;
pub type CholeskyCountF64 = oracle::CholeskyCount<f64>;
pub type CholeskyCountF32 = oracle::CholeskyCount<f32>;
pub type TreeConnectivityF64 = pruning::tgreedy::TreeConnectivity<f64>;
