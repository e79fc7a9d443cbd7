mod common;
mod strategies;

use common::graph_from;
use itertools::Itertools;
use proptest::prelude::*;
use slam_ec::clique_tree::{build_clique_tree, ec_of_clique_tree};
use slam_ec::elimination::{
    elimination_complexity, landmark_first_ordering, min_degree_ordering, Ordering,
};
use slam_ec::pruning::tgreedy::select_tree_greedy;
use slam_ec::pruning::{decimation_offsets, prune, prune_decimate, Policy};
use slam_ec::sim::{
    build_graph, simulate_trajectory, worst_case_graph, worst_case_log, ObservationLog, SimConfig,
};
use strategies::arb_graph_and_order;

fn ordering(seq: &[usize]) -> Ordering {
    Ordering::new(seq.to_vec(), seq.len()).unwrap()
}

fn small_config(seed: u64) -> SimConfig {
    let mut c = SimConfig::desk_scale(seed);
    c.n_frames = 40;
    c.landmark_count = 25;
    c.landmark_region.x_max = 40.0;
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn clique_trees_are_well_formed((dims, edges, order) in arb_graph_and_order(14, 3)) {
        let g = graph_from(&dims, &edges);
        let o = ordering(&order);
        let plain = build_clique_tree(&g, &o, false).unwrap();
        let merged = build_clique_tree(&g, &o, true).unwrap();
        let ec = elimination_complexity(&g, &o).unwrap();
        prop_assert_eq!(ec_of_clique_tree(&plain).unwrap(), ec);
        prop_assert!(ec_of_clique_tree(&merged).unwrap() >= ec);
        for tree in [&plain, &merged] {
            let mut frontal_count = vec![0; dims.len()];
            for c in &tree.cliques {
                for &v in &c.frontal {
                    frontal_count[v] += 1;
                }
            }
            prop_assert!(frontal_count.iter().all(|&c| c == 1));
            // running intersection: the cliques holding v form a subtree
            for v in 0..dims.len() {
                let holds = |i: usize| {
                    let c = &tree.cliques[i];
                    c.frontal.contains(&v) || c.separator.contains(&v)
                };
                let members: Vec<usize> = (0..tree.cliques.len()).filter(|&i| holds(i)).collect();
                let linked = members
                    .iter()
                    .filter(|&&i| tree.cliques[i].parent.is_some_and(holds))
                    .count();
                prop_assert_eq!(linked + 1, members.len());
            }
        }
    }

    #[test]
    fn pruning_only_removes_observations(seed in 0u64..1000, rate in 1usize..7) {
        let log = simulate_trajectory(&small_config(seed)).unwrap();
        for policy in Policy::ALL {
            let pruned = prune(&log, policy, rate, seed).unwrap();
            prop_assert_eq!(pruned.retained + pruned.removed, log.observation_count());
            for (frame, l) in pruned.log.observations() {
                prop_assert!(log.contains(frame, l));
            }
        }
    }

    #[test]
    fn decimation_partitions_by_offset(seed in 0u64..1000, rate in 1usize..7) {
        let log = simulate_trajectory(&small_config(seed)).unwrap();
        let offsets = decimation_offsets(&log, rate).unwrap();
        let dec = prune_decimate(&log, rate).unwrap();
        for (frame, l) in dec.log.observations() {
            prop_assert_eq!(offsets.offsets[l], Some(frame % rate));
        }
        let first = log.first_observation();
        for (l, f) in first.iter().enumerate() {
            if let Some(i) = *f {
                prop_assert!(dec.log.contains(i, l));
            }
        }
    }

    #[test]
    fn count_matched_policies(seed in 0u64..1000, rate in 2usize..7) {
        let log = simulate_trajectory(&small_config(seed)).unwrap();
        let budget = prune_decimate(&log, rate).unwrap().retained;
        for policy in [Policy::Random, Policy::TreeGreedy] {
            let p = prune(&log, policy, rate, seed).unwrap();
            prop_assert_eq!(p.retained, budget);
            for (l, f) in log.first_observation().iter().enumerate() {
                if let Some(i) = *f {
                    prop_assert!(p.log.contains(i, l));
                }
            }
        }
        let kf = prune(&log, Policy::Keyframe, rate, seed).unwrap();
        prop_assert!(kf.log.frames.iter().all(|f| f.index % rate == 0));
    }
}

#[test]
fn realized_ec_is_bounded_by_worst_case() {
    for seed in 0..300 {
        let config = small_config(seed);
        let log = simulate_trajectory(&config).unwrap();
        let g = build_graph(&log, &config.graph_params()).unwrap();
        let n_x = log.frames.len();
        let n_l = g.num_variables() - n_x;
        let worst = worst_case_graph(n_x, n_l, config.pose_dim, config.landmark_dim).unwrap();
        // same variable ids on both sides, so one sequence serves both graphs
        for order in [landmark_first_ordering(&g), min_degree_ordering(&g)] {
            assert!(
                elimination_complexity(&g, &order).unwrap()
                    <= elimination_complexity(&worst, &order).unwrap()
            );
        }
        assert!(
            elimination_complexity(&g, &min_degree_ordering(&g)).unwrap()
                <= elimination_complexity(&worst, &min_degree_ordering(&worst)).unwrap(),
            "seed {seed}"
        );
    }
}

/// Spanning trees counted by checking every (n-1)-edge subset for cycles.
fn enumerate_spanning_trees(n: usize, edges: &[(usize, usize)]) -> usize {
    edges
        .iter()
        .combinations(n - 1)
        .filter(|subset| {
            let mut parent: Vec<usize> = (0..n).collect();
            fn root(p: &mut [usize], mut x: usize) -> usize {
                while p[x] != x {
                    x = p[x];
                }
                x
            }
            subset.iter().all(|&&(a, b)| {
                let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
                parent[ra] = rb;
                ra != rb
            })
        })
        .count()
}

/// Pose-landmark graph of a log, with poses `0..frames` and landmarks after.
fn log_edges(log: &ObservationLog) -> Vec<(usize, usize)> {
    let n_x = log.frames.len();
    let mut edges: Vec<_> = (1..n_x).map(|i| (i - 1, i)).collect();
    edges.extend(log.observations().map(|(f, l)| (f, n_x + l)));
    edges
}

#[test]
fn greedy_pick_maximizes_enumerated_tree_count() {
    // two poses, two landmarks, budget of one edge beyond the initial tree
    let log = worst_case_log(2, 2);
    let sel = select_tree_greedy::<f64>(&log, 3).unwrap();
    let chosen = enumerate_spanning_trees(4, &log_edges(&sel.result.log));
    let best = [(1, 0), (1, 1)]
        .iter()
        .map(|&(f, l)| {
            let mut edges = vec![(0, 1), (0, 2), (0, 3)];
            edges.push((f, 2 + l));
            enumerate_spanning_trees(4, &edges)
        })
        .max()
        .unwrap();
    assert_eq!(chosen, best);
    assert_eq!(chosen, 3);
    assert!((sel.log_tree_counts.last().unwrap().exp() - 3.0).abs() < 1e-9);
}

#[test]
fn greedy_matches_exhaustive_choice_on_small_logs() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let n_frames = rng.gen_range(2..4);
        let n_l = rng.gen_range(1..3);
        let log = worst_case_log(n_frames, n_l);
        let base = n_l;
        let full = log.observation_count();
        for budget in base..=full {
            let sel = select_tree_greedy::<f64>(&log, budget).unwrap();
            let count = enumerate_spanning_trees(n_frames + n_l, &log_edges(&sel.result.log));
            assert!((sel.log_tree_counts.last().unwrap().exp() - count as f64).abs() < 1e-6);
        }
    }
}
