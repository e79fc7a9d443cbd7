//! Proptest strategies for random block graphs and orderings.

#![allow(dead_code)]

use itertools::Itertools;
use proptest::prelude::*;

/// `(dims, edges)` with `1..=max_n` vertices and dims in `1..=max_dim`.
pub fn arb_graph(
    max_n: usize,
    max_dim: usize,
) -> impl Strategy<Value = (Vec<usize>, Vec<(usize, usize)>)> {
    (1..=max_n).prop_flat_map(move |n| {
        let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
        let m = pairs.len();
        (
            proptest::collection::vec(1..=max_dim, n),
            proptest::collection::vec(any::<bool>(), m),
        )
            .prop_map(move |(dims, mask)| {
                let edges = pairs
                    .iter()
                    .zip(mask)
                    .filter(|(_, keep)| *keep)
                    .map(|(e, _)| *e)
                    .collect();
                (dims, edges)
            })
    })
}

/// A graph together with an arbitrary permutation of its vertices.
pub fn arb_graph_and_order(
    max_n: usize,
    max_dim: usize,
) -> impl Strategy<Value = (Vec<usize>, Vec<(usize, usize)>, Vec<usize>)> {
    arb_graph(max_n, max_dim).prop_flat_map(|(dims, edges)| {
        let n = dims.len();
        (
            Just(dims),
            Just(edges),
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
        )
    })
}
