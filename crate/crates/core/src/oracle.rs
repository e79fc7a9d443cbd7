//! Numeric ground truth for the symbolic counts: a synthetic SPD system with
//! a graph's block sparsity, factorized by a right-looking sparse Cholesky
//! that counts the arithmetic it actually performs.

use std::collections::BTreeSet;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::elimination::Ordering;
use crate::error::{Error, Result};
use crate::graph::{FactorGraph, VarId};
use crate::scalar::Scalar;

/// Symmetric matrix stored as its lower triangle, column by column.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSystem<T> {
    pub dim: usize,
    /// Scalar offset of each variable block.
    pub offsets: Vec<usize>,
    pub block_dims: Vec<usize>,
    /// `columns[j]` holds `(i, a_ij)` for `i >= j`, ascending `i`.
    pub columns: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> SparseSystem<T> {
    pub fn nnz_lower(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        self.columns[c]
            .binary_search_by_key(&r, |e| e.0)
            .map(|k| self.columns[c][k].1)
            .unwrap_or_else(|_| T::zero())
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::zero(); self.dim]; self.dim];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                d[i][j] = v;
                d[j][i] = v;
            }
        }
        d
    }

    /// Which variable owns each scalar index.
    pub fn scalar_owner(&self) -> Vec<VarId> {
        let mut owner = Vec::with_capacity(self.dim);
        for (v, &d) in self.block_dims.iter().enumerate() {
            owner.extend(std::iter::repeat_n(v, d));
        }
        owner
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.dim];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                y[i] += v * x[j];
                if i != j {
                    y[j] += v * x[i];
                }
            }
        }
        y
    }

    /// Coordinate text: a `# dim nnz` header then `row col value` for the
    /// lower triangle, 0-based.
    pub fn write_coordinate(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "# {} {}", self.dim, self.nnz_lower())?;
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                writeln!(out, "{i} {j} {:e}", v.as_f64())?;
            }
        }
        Ok(())
    }
}

/// Random values on the scalar expansion of the graph's variable adjacency
/// (diagonal blocks dense), made strictly diagonally dominant.
pub fn synthesize_system<T: Scalar>(graph: &FactorGraph, seed: u64) -> Result<SparseSystem<T>> {
    if graph.num_variables() == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let block_dims: Vec<usize> = graph.variables().iter().map(|v| v.dim).collect();
    let mut offsets = Vec::with_capacity(block_dims.len());
    let mut dim = 0;
    for &d in &block_dims {
        offsets.push(dim);
        dim += d;
    }
    let mut sample = || -> f64 {
        let m: f64 = rng.gen_range(0.1..1.0);
        if rng.gen_bool(0.5) {
            m
        } else {
            -m
        }
    };

    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
    let adj = graph.variable_adjacency();
    for u in 0..graph.num_variables() {
        // blocks (w, u) with w >= u, which keeps row indices ascending per column
        let partners = std::iter::once(u).chain(adj.neighbors(u).range(u + 1..).copied());
        for w in partners {
            for cu in 0..block_dims[u] {
                let j = offsets[u] + cu;
                for cw in 0..block_dims[w] {
                    let i = offsets[w] + cw;
                    if i > j {
                        columns[j].push((i, sample()));
                    } else if i == j {
                        columns[j].push((i, 0.0));
                    }
                }
            }
        }
    }
    for col in &mut columns {
        col.sort_by_key(|e| e.0);
    }
    let mut row_abs = vec![0.0f64; dim];
    for (j, col) in columns.iter().enumerate() {
        for &(i, v) in col {
            if i != j {
                row_abs[i] += v.abs();
                row_abs[j] += v.abs();
            }
        }
    }
    let columns = columns
        .into_iter()
        .enumerate()
        .map(|(j, col)| {
            col.into_iter()
                .map(|(i, v)| (i, T::of(if i == j { row_abs[j] + 1.0 } else { v })))
                .collect()
        })
        .collect();
    Ok(SparseSystem {
        dim,
        offsets,
        block_dims,
        columns,
    })
}

/// Lower-triangular Cholesky factor `L` (so `R = L^T`) in permuted indices.
#[derive(Clone, Debug, PartialEq)]
pub struct CholeskyFactor<T> {
    /// `perm[k]` is the original scalar index placed at position `k`.
    pub perm: Vec<usize>,
    /// `columns[k]` is `(i, l_ik)` for `i >= k`, diagonal first.
    pub columns: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> CholeskyFactor<T> {
    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// Solves `A x = b` using `P A P^T = L L^T`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.perm.len();
        let mut y: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for k in 0..n {
            let col = &self.columns[k];
            y[k] /= col[0].1;
            let yk = y[k];
            for &(i, l) in &col[1..] {
                y[i] -= l * yk;
            }
        }
        for k in (0..n).rev() {
            let col = &self.columns[k];
            let mut s = y[k];
            for &(i, l) in &col[1..] {
                s -= l * y[i];
            }
            y[k] = s / col[0].1;
        }
        let mut x = vec![T::zero(); n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        x
    }

    /// Dense `L L^T` in permuted indices.
    pub fn reconstruct_permuted(&self) -> Vec<Vec<T>> {
        let n = self.perm.len();
        let mut dense_l = vec![vec![T::zero(); n]; n];
        for (k, col) in self.columns.iter().enumerate() {
            for &(i, l) in col {
                dense_l[i][k] = l;
            }
        }
        let mut out = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            for j in 0..=i {
                let s = dense_l[i][..=j]
                    .iter()
                    .zip(&dense_l[j][..=j])
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b);
                out[i][j] = s;
                out[j][i] = s;
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CholeskyCount<T> {
    /// Multiplications: column scaling by the reciprocal pivot plus every
    /// Schur-complement update.
    pub mult_count: u64,
    /// One reciprocal per pivot with a non-empty column below it.
    pub div_count: u64,
    pub sqrt_count: u64,
    /// Structurally new off-diagonal entries.
    pub fill_count: u64,
    /// Fill entries as original scalar index pairs `(a, b)` with `a < b`.
    pub fill: BTreeSet<(usize, usize)>,
    pub factor: CholeskyFactor<T>,
}

/// Scalar permutation that eliminates each block contiguously in `ordering`.
pub fn scalar_permutation<T: Scalar>(
    system: &SparseSystem<T>,
    ordering: &Ordering,
) -> Result<Vec<usize>> {
    if ordering.len() != system.block_dims.len() {
        return Err(Error::InvalidOrdering(format!(
            "ordering has {} entries, system has {} blocks",
            ordering.len(),
            system.block_dims.len()
        )));
    }
    Ok(ordering
        .as_slice()
        .iter()
        .flat_map(|&v| system.offsets[v]..system.offsets[v] + system.block_dims[v])
        .collect())
}

/// Right-looking sparse Cholesky of `P A P^T`. Values live in a dense
/// workspace; only entries in the (growing) sparsity pattern are touched and
/// counted, so counts depend on structure alone.
pub fn cholesky_count<T: Scalar>(
    system: &SparseSystem<T>,
    ordering: &Ordering,
) -> Result<CholeskyCount<T>> {
    let perm = scalar_permutation(system, ordering)?;
    let n = system.dim;
    let mut inv = vec![0usize; n];
    for (k, &p) in perm.iter().enumerate() {
        inv[p] = k;
    }

    let mut values = vec![T::zero(); n * n];
    let mut present = vec![false; n * n];
    let mut pattern: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (j, col) in system.columns.iter().enumerate() {
        for &(i, v) in col {
            let (pi, pj) = (inv[i], inv[j]);
            let (r, c) = if pi >= pj { (pi, pj) } else { (pj, pi) };
            values[c * n + r] = v;
            if r != c {
                present[c * n + r] = true;
                pattern[c].push(r);
            }
        }
    }

    let (mut mults, mut divs, mut sqrts, mut fill_count) = (0u64, 0u64, 0u64, 0u64);
    let mut fill = BTreeSet::new();
    let mut columns = Vec::with_capacity(n);
    for k in 0..n {
        let mut rows = std::mem::take(&mut pattern[k]);
        rows.sort_unstable();
        let pivot = values[k * n + k];
        if pivot <= T::zero() || !pivot.is_finite() {
            return Err(Error::NotPositiveDefinite {
                pivot: k,
                scalar_index: perm[k],
                value: pivot.as_f64(),
            });
        }
        let lkk = pivot.sqrt();
        sqrts += 1;
        values[k * n + k] = lkk;
        if !rows.is_empty() {
            let recip = T::one() / lkk;
            divs += 1;
            for &i in &rows {
                values[k * n + i] *= recip;
                mults += 1;
            }
        }
        for (a, &i) in rows.iter().enumerate() {
            let li = values[k * n + i];
            for &j in &rows[..=a] {
                let delta = li * values[k * n + j];
                mults += 1;
                values[j * n + i] -= delta;
                if i != j && !present[j * n + i] {
                    present[j * n + i] = true;
                    pattern[j].push(i);
                    fill_count += 1;
                    let (x, y) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
                    fill.insert((x, y));
                }
            }
        }
        let mut col = Vec::with_capacity(rows.len() + 1);
        col.push((k, lkk));
        col.extend(rows.iter().map(|&i| (i, values[k * n + i])));
        columns.push(col);
    }

    Ok(CholeskyCount {
        mult_count: mults,
        div_count: divs,
        sqrt_count: sqrts,
        fill_count,
        fill,
        factor: CholeskyFactor { perm, columns },
    })
}

/// Pearson correlation coefficient of two equal-length series.
pub fn pearson_correlation<T: Scalar>(xs: &[T], ys: &[T]) -> Result<T> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::SeriesLength(xs.len(), ys.len()));
    }
    let n = T::from_usize(xs.len()).expect("length fits in a float");
    let mx = xs.iter().fold(T::zero(), |a, &x| a + x) / n;
    let my = ys.iter().fold(T::zero(), |a, &y| a + y) / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if !(sxx.is_finite() && syy.is_finite()) || sxx <= T::zero() || syy <= T::zero() {
        return Err(Error::DegenerateVariance);
    }
    let r = sxy / (sxx.sqrt() * syy.sqrt());
    Ok(r.max(-T::one()).min(T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elimination::natural_ordering;
    use crate::graph::VarKind;
    use crate::sim::worst_case_graph;
    use approx::assert_relative_eq;

    fn scalar_graph(n: usize, edges: &[(usize, usize)]) -> FactorGraph {
        let mut g = FactorGraph::new();
        for _ in 0..n {
            g.add_variable(VarKind::Pose, 1).unwrap();
        }
        for &(a, b) in edges {
            g.add_factor(&[a, b]).unwrap();
        }
        g
    }

    #[test]
    fn path_is_tridiagonal() {
        let s = synthesize_system::<f64>(&scalar_graph(3, &[(0, 1), (1, 2)]), 1).unwrap();
        assert_eq!(s.nnz_lower(), 5);
        assert_eq!(s.get(2, 0), 0.0);
        assert_ne!(s.get(1, 0), 0.0);
    }

    #[test]
    fn worst_case_has_no_landmark_landmark_entry() {
        let s = synthesize_system::<f64>(&worst_case_graph(2, 2, 1, 1).unwrap(), 3).unwrap();
        assert_eq!(s.get(2, 3), 0.0);
        assert_ne!(s.get(0, 1), 0.0);
    }

    #[test]
    fn synthesis_is_seeded() {
        let g = worst_case_graph(3, 2, 6, 3).unwrap();
        assert_eq!(
            synthesize_system::<f64>(&g, 5).unwrap(),
            synthesize_system::<f64>(&g, 5).unwrap()
        );
        assert_ne!(
            synthesize_system::<f64>(&g, 5).unwrap(),
            synthesize_system::<f64>(&g, 6).unwrap()
        );
    }

    #[test]
    fn counts_on_small_graphs() {
        let path = scalar_graph(3, &[(0, 1), (1, 2)]);
        let s = synthesize_system::<f64>(&path, 0).unwrap();
        let c = cholesky_count(&s, &natural_ordering(&path)).unwrap();
        assert_eq!((c.mult_count, c.fill_count), (4, 0));

        let k3 = scalar_graph(3, &[(0, 1), (0, 2), (1, 2)]);
        let c = cholesky_count(
            &synthesize_system::<f64>(&k3, 0).unwrap(),
            &natural_ordering(&k3),
        )
        .unwrap();
        assert_eq!(c.mult_count, 7);

        let k4 = scalar_graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let c = cholesky_count(
            &synthesize_system::<f32>(&k4, 0).unwrap(),
            &natural_ordering(&k4),
        )
        .unwrap();
        assert_eq!(c.mult_count, 16);
        assert_eq!(c.div_count, 3);
    }

    #[test]
    fn factor_reproduces_matrix() {
        let g = worst_case_graph(4, 3, 2, 3).unwrap();
        let s = synthesize_system::<f64>(&g, 11).unwrap();
        let o = crate::elimination::landmark_first_ordering(&g);
        let c = cholesky_count(&s, &o).unwrap();
        let llt = c.factor.reconstruct_permuted();
        let a = s.to_dense();
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..s.dim {
            for j in 0..s.dim {
                let want = a[c.factor.perm[i]][c.factor.perm[j]];
                num += (llt[i][j] - want).powi(2);
                den += want * want;
            }
        }
        assert!((num / den).sqrt() < 1e-9);
    }

    #[test]
    fn negative_pivot_is_named() {
        let g = scalar_graph(2, &[(0, 1)]);
        let mut s = synthesize_system::<f64>(&g, 0).unwrap();
        s.columns[1][0].1 = -1.0;
        match cholesky_count(&s, &natural_ordering(&g)) {
            Err(Error::NotPositiveDefinite {
                pivot: 1,
                scalar_index: 1,
                ..
            }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pearson_basics() {
        let xs = [1.0, 2.0, 4.0, 7.0];
        let twice: Vec<f64> = xs.iter().map(|x| 2.0 * x).collect();
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert_relative_eq!(
            pearson_correlation(&xs, &twice).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            pearson_correlation(&xs, &neg).unwrap(),
            -1.0,
            epsilon = 1e-12
        );
        assert!(matches!(
            pearson_correlation(&xs, &[3.0; 4]),
            Err(Error::DegenerateVariance)
        ));
        assert!(pearson_correlation(&xs[..2], &twice[..2]).is_err());
    }

    #[test]
    fn coordinate_export() {
        let s = synthesize_system::<f64>(&scalar_graph(2, &[(0, 1)]), 0).unwrap();
        let mut buf = Vec::new();
        s.write_coordinate(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 3);
        assert!(text.starts_with("# 2 3\n"));
    }
}
