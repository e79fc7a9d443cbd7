//! Multifrontal clique trees built from an elimination.
//!
//! Each variable's elimination clique is the variable plus its separator. A
//! variable is folded into the supernode of the next variable in the ordering
//! when that variable is its only elimination-tree child's parent and the two
//! cliques nest exactly (fundamental supernodes, no relaxed amalgamation).

use std::fmt::Write as _;

use crate::elimination::{simulate_elimination, EliminationTrace, Ordering};
use crate::error::{Error, Result};
use crate::graph::{FactorGraph, VarId};
use crate::Ec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clique {
    /// Frontal variables in elimination order.
    pub frontal: Vec<VarId>,
    /// Separator variables, ascending id.
    pub separator: Vec<VarId>,
    pub parent: Option<usize>,
    pub frontal_dim: usize,
    pub separator_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueTree {
    pub cliques: Vec<Clique>,
    /// Cliques with an empty separator; one per connected component.
    pub roots: Vec<usize>,
}

impl CliqueTree {
    pub fn children(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        self.cliques
            .iter()
            .enumerate()
            .filter(move |(_, c)| c.parent == Some(idx))
            .map(|(i, _)| i)
    }

    /// Indented `[frontals | separators]` dump, children below their parent.
    pub fn dump(&self) -> String {
        fn ids(v: &[VarId]) -> String {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        }
        fn walk(tree: &CliqueTree, idx: usize, depth: usize, out: &mut String) {
            let c = &tree.cliques[idx];
            let _ = writeln!(
                out,
                "{}[{} | {}]",
                "  ".repeat(depth),
                ids(&c.frontal),
                ids(&c.separator)
            );
            for child in tree.children(idx) {
                walk(tree, child, depth + 1, out);
            }
        }
        let mut out = String::new();
        for &r in &self.roots {
            walk(self, r, 0, &mut out);
        }
        out
    }
}

pub fn build_clique_tree(
    graph: &FactorGraph,
    ordering: &Ordering,
    amalgamate: bool,
) -> Result<CliqueTree> {
    let trace = simulate_elimination(graph, ordering)?;
    Ok(clique_tree_from_trace(graph, ordering, &trace, amalgamate))
}

pub fn clique_tree_from_trace(
    graph: &FactorGraph,
    ordering: &Ordering,
    trace: &EliminationTrace,
    amalgamate: bool,
) -> CliqueTree {
    let pos = ordering.positions();
    let n = trace.steps.len();
    // elimination-tree parent: lowest-ordered separator variable
    let etree_parent: Vec<Option<VarId>> = trace
        .steps
        .iter()
        .map(|s| s.separator.iter().copied().min_by_key(|&u| pos[u]))
        .collect();
    let mut child_count = vec![0usize; graph.num_variables()];
    for p in etree_parent.iter().flatten() {
        child_count[*p] += 1;
    }

    let mut clique_of = vec![usize::MAX; graph.num_variables()];
    let mut cliques: Vec<Clique> = Vec::new();
    let mut i = 0;
    while i < n {
        let mut frontal = vec![trace.steps[i].var];
        let mut last = i;
        while amalgamate && last + 1 < n {
            let cur = &trace.steps[last];
            let next = &trace.steps[last + 1];
            let nests = etree_parent[last] == Some(next.var)
                && child_count[next.var] == 1
                && cur.separator.len() == next.separator.len() + 1;
            if !nests {
                break;
            }
            frontal.push(next.var);
            last += 1;
        }
        let step = &trace.steps[last];
        let idx = cliques.len();
        for &v in &frontal {
            clique_of[v] = idx;
        }
        cliques.push(Clique {
            frontal_dim: frontal.iter().map(|&v| graph.dim(v)).sum(),
            frontal,
            separator: step.separator.clone(),
            parent: None,
            separator_dim: step.separator_dim,
        });
        i = last + 1;
    }

    let mut roots = Vec::new();
    for (idx, clique) in cliques.iter_mut().enumerate() {
        match clique.separator.iter().copied().min_by_key(|&u| pos[u]) {
            Some(u) => clique.parent = Some(clique_of[u]),
            None => roots.push(idx),
        }
    }
    CliqueTree { cliques, roots }
}

/// Sum over cliques of `d_f(C) (d_f(C) + d_s(C))^2`.
pub fn ec_of_clique_tree(tree: &CliqueTree) -> Result<Ec> {
    tree.cliques.iter().try_fold(0u64, |acc, c| {
        let f = c.frontal_dim as u64;
        let w = (c.frontal_dim + c.separator_dim) as u64;
        w.checked_mul(w)
            .and_then(|sq| sq.checked_mul(f))
            .and_then(|t| acc.checked_add(t))
            .ok_or(Error::Overflow("clique tree complexity"))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elimination::{elimination_complexity, landmark_first_ordering};
    use crate::graph::VarKind;

    fn path3() -> FactorGraph {
        let mut g = FactorGraph::new();
        for _ in 0..3 {
            g.add_variable(VarKind::Pose, 1).unwrap();
        }
        g.add_factor(&[0, 1]).unwrap();
        g.add_factor(&[1, 2]).unwrap();
        g
    }

    #[test]
    fn path_leaf_first_becomes_chain() {
        let g = path3();
        let o = Ordering::new(vec![0, 1, 2], 3).unwrap();
        let plain = build_clique_tree(&g, &o, false).unwrap();
        assert_eq!(plain.dump(), "[2 | ]\n  [1 | 2]\n    [0 | 1]\n");
        let merged = build_clique_tree(&g, &o, true).unwrap();
        assert_eq!(merged.dump(), "[1 2 | ]\n  [0 | 1]\n");
        assert_eq!(merged.roots.len(), 1);
    }

    #[test]
    fn single_variable_single_root() {
        let mut g = FactorGraph::new();
        g.add_variable(VarKind::Pose, 3).unwrap();
        let t = build_clique_tree(&g, &Ordering::new(vec![0], 1).unwrap(), true).unwrap();
        assert_eq!(t.cliques.len(), 1);
        assert!(t.cliques[0].separator.is_empty());
        assert_eq!(ec_of_clique_tree(&t).unwrap(), 27);
    }

    #[test]
    fn worst_case_two_by_two() {
        // poses 0, 1 chained; landmarks 2, 3 seen from both poses
        let mut g = FactorGraph::new();
        g.add_variable(VarKind::Pose, 1).unwrap();
        g.add_variable(VarKind::Pose, 1).unwrap();
        g.add_variable(VarKind::Landmark, 1).unwrap();
        g.add_variable(VarKind::Landmark, 1).unwrap();
        for f in [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3]] {
            g.add_factor(&f).unwrap();
        }
        let o = landmark_first_ordering(&g);
        let t = build_clique_tree(&g, &o, true).unwrap();
        assert_eq!(t.dump(), "[0 1 | ]\n  [2 | 0 1]\n  [3 | 0 1]\n");
        assert_eq!(ec_of_clique_tree(&t).unwrap(), 26);
        let plain = build_clique_tree(&g, &o, false).unwrap();
        assert_eq!(
            ec_of_clique_tree(&plain).unwrap(),
            elimination_complexity(&g, &o).unwrap()
        );
    }
}
