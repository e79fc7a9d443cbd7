//! Node elimination on the variable adjacency, elimination complexity, and
//! elimination orderings.

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Adjacency, FactorGraph, VarId, VarKind};
use crate::Ec;

/// Largest graph accepted by [`optimal_ordering_bruteforce`].
pub const MAX_BRUTE_FORCE_VARS: usize = 10;

/// An elimination sequence: a permutation of all variable ids of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ordering(Vec<VarId>);

impl Ordering {
    /// Validates that `sequence` is a permutation of `0..n`.
    pub fn new(sequence: Vec<VarId>, n: usize) -> Result<Self> {
        if sequence.len() != n {
            return Err(Error::InvalidOrdering(format!(
                "expected {n} variables, got {}",
                sequence.len()
            )));
        }
        let mut seen = vec![false; n];
        for &v in &sequence {
            if v >= n {
                return Err(Error::InvalidOrdering(format!("variable {v} out of range")));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidOrdering(format!("variable {v} repeated")));
            }
        }
        Ok(Self(sequence))
    }

    pub fn for_graph(sequence: Vec<VarId>, graph: &FactorGraph) -> Result<Self> {
        Self::new(sequence, graph.num_variables())
    }

    pub fn as_slice(&self) -> &[VarId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<VarId> {
        self.0
    }

    /// `positions()[v]` is the step at which `v` is eliminated.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            pos[v] = i;
        }
        pos
    }

    /// One id per line.
    pub fn write_to(&self, mut out: impl Write) -> Result<()> {
        for v in &self.0 {
            writeln!(out, "{v}")?;
        }
        Ok(())
    }

    pub fn read_from(input: impl Read, n: usize) -> Result<Self> {
        let mut seq = Vec::new();
        for (idx, line) in BufReader::new(input).lines().enumerate() {
            let line = line?;
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            seq.push(text.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("expected a variable id, got `{text}`"),
            })?);
        }
        Self::new(seq, n)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(fs::File::create(path)?)
    }

    pub fn load(path: impl AsRef<Path>, n: usize) -> Result<Self> {
        Self::read_from(fs::File::open(path)?, n)
    }
}

impl AsRef<[VarId]> for Ordering {
    fn as_ref(&self) -> &[VarId] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationStep {
    pub var: VarId,
    pub frontal_dim: usize,
    pub separator_dim: usize,
    /// Not-yet-eliminated neighbors at this step, ascending.
    pub separator: Vec<VarId>,
    /// Edges `(u, v)` with `u < v` induced by this step.
    pub fill: Vec<(VarId, VarId)>,
}

impl EliminationStep {
    pub fn complexity(&self) -> Result<Ec> {
        let f = self.frontal_dim as u64;
        let w = (self.frontal_dim + self.separator_dim) as u64;
        w.checked_mul(w)
            .and_then(|sq| sq.checked_mul(f))
            .ok_or(Error::Overflow("elimination complexity"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationTrace {
    pub steps: Vec<EliminationStep>,
}

impl EliminationTrace {
    pub fn fill_count(&self) -> usize {
        self.steps.iter().map(|s| s.fill.len()).sum()
    }

    pub fn fill_edges(&self) -> BTreeSet<(VarId, VarId)> {
        self.steps
            .iter()
            .flat_map(|s| s.fill.iter().copied())
            .collect()
    }

    /// Sum of `d_f (d_f + d_s)^2` over all steps.
    pub fn complexity(&self) -> Result<Ec> {
        self.steps.iter().try_fold(0u64, |acc, s| {
            acc.checked_add(s.complexity()?)
                .ok_or(Error::Overflow("elimination complexity"))
        })
    }

    /// CSV with columns `step,var_id,d_f,d_s,fill_added`.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "var_id", "d_f", "d_s", "fill_added"])?;
        for (i, s) in self.steps.iter().enumerate() {
            w.write_record([
                i.to_string(),
                s.var.to_string(),
                s.frontal_dim.to_string(),
                s.separator_dim.to_string(),
                s.fill.len().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Eliminates variables one at a time in `ordering`, connecting each
/// variable's remaining neighbors into a clique.
pub fn simulate_elimination(graph: &FactorGraph, ordering: &Ordering) -> Result<EliminationTrace> {
    if ordering.len() != graph.num_variables() {
        return Err(Error::InvalidOrdering(format!(
            "ordering has {} entries, graph has {} variables",
            ordering.len(),
            graph.num_variables()
        )));
    }
    let mut adj: Adjacency = graph.variable_adjacency().clone();
    let mut steps = Vec::with_capacity(ordering.len());
    for &v in ordering.as_slice() {
        let separator: Vec<VarId> = adj.neighbors(v).iter().copied().collect();
        let mut fill = Vec::new();
        for (i, &a) in separator.iter().enumerate() {
            for &b in &separator[i + 1..] {
                if adj.insert_edge(a, b) {
                    fill.push((a, b));
                }
            }
        }
        adj.remove_vertex(v);
        steps.push(EliminationStep {
            var: v,
            frontal_dim: graph.dim(v),
            separator_dim: separator.iter().map(|&u| graph.dim(u)).sum(),
            separator,
            fill,
        });
    }
    Ok(EliminationTrace { steps })
}

pub fn elimination_complexity(graph: &FactorGraph, ordering: &Ordering) -> Result<Ec> {
    simulate_elimination(graph, ordering)?.complexity()
}

/// Rose's multiplication count `1/2 sum d(i) (d(i) + 3)` for scalar
/// Cholesky. The last eliminated node always has degree zero and contributes
/// nothing, so summing over every step equals the sum to `n - 1`.
pub fn scalar_mult_count(graph: &FactorGraph, ordering: &Ordering) -> Result<Ec> {
    if let Some(v) = graph.variables().iter().find(|v| v.dim != 1) {
        return Err(Error::NonScalar(v.id));
    }
    let trace = simulate_elimination(graph, ordering)?;
    let twice = trace.steps.iter().try_fold(0u64, |acc, s| {
        let d = s.separator.len() as u64;
        d.checked_mul(d + 3)
            .and_then(|t| acc.checked_add(t))
            .ok_or(Error::Overflow("multiplication count"))
    })?;
    Ok(twice / 2)
}

pub fn natural_ordering(graph: &FactorGraph) -> Ordering {
    Ordering((0..graph.num_variables()).collect())
}

/// All landmarks in ascending id, then all poses in ascending id.
pub fn landmark_first_ordering(graph: &FactorGraph) -> Ordering {
    let of_kind = |kind| {
        graph
            .variables()
            .iter()
            .filter(move |v| v.kind == kind)
            .map(|v| v.id)
    };
    Ordering(
        of_kind(VarKind::Landmark)
            .chain(of_kind(VarKind::Pose))
            .collect(),
    )
}

fn kind_rank(kind: VarKind) -> u8 {
    match kind {
        VarKind::Landmark => 0,
        VarKind::Pose => 1,
    }
}

/// Greedy minimum degree, with degree measured as the summed scalar
/// dimension of current neighbors. Ties go to landmarks, then to the lowest id.
pub fn min_degree_ordering(graph: &FactorGraph) -> Ordering {
    let n = graph.num_variables();
    let mut adj = graph.variable_adjacency().clone();
    let weight = |adj: &Adjacency, v: VarId| -> usize {
        adj.neighbors(v).iter().map(|&u| graph.dim(u)).sum()
    };
    let key = |deg: usize, v: VarId| (deg, kind_rank(graph.variable(v).kind), v);

    let mut degree: Vec<usize> = (0..n).map(|v| weight(&adj, v)).collect();
    let mut queue: BTreeSet<(usize, u8, VarId)> = (0..n).map(|v| key(degree[v], v)).collect();
    let mut order = Vec::with_capacity(n);

    while let Some((_, _, v)) = queue.pop_first() {
        order.push(v);
        let separator: Vec<VarId> = adj.neighbors(v).iter().copied().collect();
        for (i, &a) in separator.iter().enumerate() {
            for &b in &separator[i + 1..] {
                adj.insert_edge(a, b);
            }
        }
        adj.remove_vertex(v);
        for &u in &separator {
            queue.remove(&key(degree[u], u));
            degree[u] = weight(&adj, u);
            queue.insert(key(degree[u], u));
        }
    }
    Ordering(order)
}

/// Exact minimum-EC ordering by dynamic programming over eliminated subsets.
///
/// The separator of `v` after eliminating a set `S` depends only on `S`: it is
/// every variable outside `S` reachable from `v` through `S`. That makes the
/// cost of a step a function of `(S, v)` and the optimum a shortest path on
/// the subset lattice. Among optimal orderings the lexicographically smallest
/// is returned.
pub fn optimal_ordering_bruteforce(graph: &FactorGraph) -> Result<(Ordering, Ec)> {
    let n = graph.num_variables();
    if n > MAX_BRUTE_FORCE_VARS {
        return Err(Error::GraphTooLarge {
            size: n,
            max: MAX_BRUTE_FORCE_VARS,
        });
    }
    let adj = graph.variable_adjacency();
    let nbr: Vec<u32> = (0..n)
        .map(|v| adj.neighbors(v).iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect();
    let dims: Vec<u64> = (0..n).map(|v| graph.dim(v) as u64).collect();

    let step_cost = |eliminated: u32, v: usize| -> Result<Ec> {
        let mut reach = 1u32 << v;
        let mut frontier = 1u32 << v;
        while frontier != 0 {
            let u = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = nbr[u] & !reach;
            reach |= fresh;
            frontier |= fresh & eliminated;
        }
        let sep = reach & !eliminated & !(1 << v);
        let ds: u64 = (0..n)
            .filter(|&u| sep & (1 << u) != 0)
            .map(|u| dims[u])
            .sum();
        let w = dims[v] + ds;
        w.checked_mul(w)
            .and_then(|sq| sq.checked_mul(dims[v]))
            .ok_or(Error::Overflow("elimination complexity"))
    };

    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    // best[s]: minimum cost to eliminate everything outside s, given s is gone.
    let mut best = vec![0u64; 1 << n];
    for s in (0..full).rev() {
        let mut m = u64::MAX;
        for v in 0..n {
            if s & (1 << v) == 0 {
                let c = step_cost(s, v)?
                    .checked_add(best[(s | (1 << v)) as usize])
                    .ok_or(Error::Overflow("elimination complexity"))?;
                m = m.min(c);
            }
        }
        best[s as usize] = m;
    }

    let mut order = Vec::with_capacity(n);
    let mut s = 0u32;
    while s != full {
        let v = (0..n)
            .find(|&v| {
                s & (1 << v) == 0
                    && step_cost(s, v)
                        .ok()
                        .map(|c| c + best[(s | (1 << v)) as usize])
                        == Some(best[s as usize])
            })
            .expect("an optimal continuation exists");
        order.push(v);
        s |= 1 << v;
    }
    Ok((Ordering(order), best[0]))
}
