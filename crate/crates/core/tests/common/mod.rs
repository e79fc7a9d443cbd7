//! Random graph generators and brute-force oracles shared by the integration
//! tests. Nothing here calls the library's ordering or elimination code.

#![allow(dead_code)]

use std::collections::BTreeSet;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use slam_ec::{FactorGraph, VarKind};

/// Builds a graph with the given dims and binary factors.
pub fn graph_from(dims: &[usize], edges: &[(usize, usize)]) -> FactorGraph {
    let mut g = FactorGraph::new();
    for (i, &d) in dims.iter().enumerate() {
        let kind = if i % 2 == 0 {
            VarKind::Pose
        } else {
            VarKind::Landmark
        };
        g.add_variable(kind, d).unwrap();
    }
    for &(a, b) in edges {
        g.add_factor(&[a, b]).unwrap();
    }
    g
}

/// Erdos-Renyi edge set on `n` vertices.
pub fn random_edges(rng: &mut impl Rng, n: usize, density: f64) -> Vec<(usize, usize)> {
    (0..n)
        .tuple_combinations()
        .filter(|_| rng.gen_bool(density))
        .collect()
}

pub fn random_scalar_graph(rng: &mut impl Rng, n: usize, density: f64) -> FactorGraph {
    graph_from(&vec![1; n], &random_edges(rng, n, density))
}

pub fn random_block_graph(
    rng: &mut impl Rng,
    n: usize,
    density: f64,
    max_dim: usize,
) -> FactorGraph {
    let dims: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=max_dim)).collect();
    graph_from(&dims, &random_edges(rng, n, density))
}

pub fn random_permutation(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Separator dimension of each step of eliminating `order` on the undirected
/// graph `edges`, computed from reachability: the separator of `v` is every
/// later vertex reachable from `v` through already-eliminated vertices.
pub fn reference_separator_dims(
    dims: &[usize],
    edges: &[(usize, usize)],
    order: &[usize],
) -> Vec<usize> {
    let n = dims.len();
    let mut adj = vec![BTreeSet::new(); n];
    for &(a, b) in edges {
        if a != b {
            adj[a].insert(b);
            adj[b].insert(a);
        }
    }
    let mut eliminated = vec![false; n];
    let mut out = Vec::with_capacity(n);
    for &v in order {
        let mut seen = vec![false; n];
        let mut stack = vec![v];
        seen[v] = true;
        let mut sep_dim = 0;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if seen[w] {
                    continue;
                }
                seen[w] = true;
                if eliminated[w] {
                    stack.push(w);
                } else {
                    sep_dim += dims[w];
                }
            }
        }
        eliminated[v] = true;
        out.push(sep_dim);
    }
    out
}

/// Block EC of eliminating `order`, from [`reference_separator_dims`].
pub fn reference_ec(dims: &[usize], edges: &[(usize, usize)], order: &[usize]) -> u64 {
    order
        .iter()
        .zip(reference_separator_dims(dims, edges, order))
        .map(|(&v, s)| {
            let (f, w) = (dims[v] as u64, (dims[v] + s) as u64);
            f * w * w
        })
        .sum()
}

/// Minimum EC over every permutation.
pub fn enumerated_optimum(dims: &[usize], edges: &[(usize, usize)]) -> u64 {
    (0..dims.len())
        .permutations(dims.len())
        .map(|p| reference_ec(dims, edges, &p))
        .min()
        .unwrap_or(0)
}
