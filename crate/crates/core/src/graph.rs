//! Block factor graphs and their variable adjacency.
//!
//! Factors are hyperedges over variables. Elimination acts on the moralized
//! view: two variables are adjacent iff some factor contains both, which is
//! exactly the block sparsity pattern of the normal-equations matrix.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VarId = usize;
pub type FactorId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Pose,
    Landmark,
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarKind::Pose => f.write_str("pose"),
            VarKind::Landmark => f.write_str("landmark"),
        }
    }
}

impl FromStr for VarKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pose" => Ok(VarKind::Pose),
            "landmark" => Ok(VarKind::Landmark),
            other => Err(format!("unknown variable kind `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub id: VarId,
    pub kind: VarKind,
    /// Scalar dimension of the variable block.
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub id: FactorId,
    pub vars: Vec<VarId>,
}

/// Symmetric, irreflexive neighbor sets indexed by variable id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Adjacency {
    neighbors: Vec<BTreeSet<VarId>>,
}

impl Adjacency {
    pub fn with_vertices(n: usize) -> Self {
        Self {
            neighbors: vec![BTreeSet::new(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn neighbors(&self, v: VarId) -> &BTreeSet<VarId> {
        &self.neighbors[v]
    }

    pub fn contains_edge(&self, u: VarId, v: VarId) -> bool {
        self.neighbors[u].contains(&v)
    }

    pub fn degree(&self, v: VarId) -> usize {
        self.neighbors[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VarId, VarId)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.range(u + 1..).map(move |&v| (u, v)))
    }

    fn push_vertex(&mut self) {
        self.neighbors.push(BTreeSet::new());
    }

    /// Returns true if the edge was absent.
    pub(crate) fn insert_edge(&mut self, u: VarId, v: VarId) -> bool {
        debug_assert_ne!(u, v);
        let fresh = self.neighbors[u].insert(v);
        self.neighbors[v].insert(u);
        fresh
    }

    pub(crate) fn remove_vertex(&mut self, v: VarId) {
        let ns = std::mem::take(&mut self.neighbors[v]);
        for u in ns {
            self.neighbors[u].remove(&v);
        }
    }
}

/// A block-structured factor graph. Variable and factor ids are dense and
/// assigned in insertion order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FactorGraph {
    variables: Vec<Variable>,
    factors: Vec<Factor>,
    adjacency: Adjacency,
}

impl FactorGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, kind: VarKind, dim: usize) -> Result<VarId> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let id = self.variables.len();
        self.variables.push(Variable { id, kind, dim });
        self.adjacency.push_vertex();
        Ok(id)
    }

    pub fn add_factor(&mut self, vars: &[VarId]) -> Result<FactorId> {
        if vars.is_empty() {
            return Err(Error::EmptyFactor);
        }
        let mut seen = BTreeSet::new();
        for &v in vars {
            if v >= self.variables.len() {
                return Err(Error::UnknownVariable(v));
            }
            if !seen.insert(v) {
                return Err(Error::DuplicateVariable(v));
            }
        }
        for (i, &u) in vars.iter().enumerate() {
            for &v in &vars[i + 1..] {
                self.adjacency.insert_edge(u, v);
            }
        }
        let id = self.factors.len();
        self.factors.push(Factor {
            id,
            vars: vars.to_vec(),
        });
        Ok(id)
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.variables[id]
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn dim(&self, id: VarId) -> usize {
        self.variables[id].dim
    }

    /// Total scalar dimension of the system.
    pub fn scalar_dim(&self) -> usize {
        self.variables.iter().map(|v| v.dim).sum()
    }

    pub fn count_kind(&self, kind: VarKind) -> usize {
        self.variables.iter().filter(|v| v.kind == kind).count()
    }

    pub fn is_scalar(&self) -> bool {
        self.variables.iter().all(|v| v.dim == 1)
    }

    /// The moralized variable-variable graph.
    pub fn variable_adjacency(&self) -> &Adjacency {
        &self.adjacency
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut file = fs::File::create(path)?;
        self.write_to(&mut file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(fs::File::open(path)?)
    }

    /// Writes `V <id> <kind> <dim>` records followed by `F <id> <vid>...`.
    pub fn write_to(&self, mut out: impl Write) -> Result<()> {
        writeln!(
            out,
            "# factor graph: {} variables, {} factors",
            self.variables.len(),
            self.factors.len()
        )?;
        for v in &self.variables {
            writeln!(out, "V {} {} {}", v.id, v.kind, v.dim)?;
        }
        for f in &self.factors {
            write!(out, "F {}", f.id)?;
            for v in &f.vars {
                write!(out, " {v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn read_from(input: impl Read) -> Result<Self> {
        let mut graph = FactorGraph::new();
        for (idx, line) in BufReader::new(input).lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut fields = content.split_whitespace();
            let tag = fields.next().unwrap_or_default();
            let nums = |fields: std::str::SplitWhitespace<'_>| -> Result<Vec<usize>> {
                fields
                    .map(|f| {
                        f.parse::<usize>()
                            .map_err(|_| err(format!("expected a non-negative integer, got `{f}`")))
                    })
                    .collect()
            };
            match tag {
                "V" => {
                    let id: usize = fields
                        .next()
                        .ok_or_else(|| err("missing variable id".into()))?
                        .parse()
                        .map_err(|_| err("variable id is not an integer".into()))?;
                    let kind: VarKind = fields
                        .next()
                        .ok_or_else(|| err("missing variable kind".into()))?
                        .parse()
                        .map_err(err)?;
                    let dim: usize = fields
                        .next()
                        .ok_or_else(|| err("missing variable dimension".into()))?
                        .parse()
                        .map_err(|_| err("dimension is not an integer".into()))?;
                    if fields.next().is_some() {
                        return Err(err("trailing fields after variable record".into()));
                    }
                    if id != graph.num_variables() {
                        return Err(err(format!(
                            "variable ids must be dense and ordered: expected {}, got {id}",
                            graph.num_variables()
                        )));
                    }
                    graph
                        .add_variable(kind, dim)
                        .map_err(|e| err(e.to_string()))?;
                }
                "F" => {
                    let ids = nums(fields)?;
                    let (&id, vars) = ids
                        .split_first()
                        .ok_or_else(|| err("missing factor id".into()))?;
                    if id != graph.num_factors() {
                        return Err(err(format!(
                            "factor ids must be dense and ordered: expected {}, got {id}",
                            graph.num_factors()
                        )));
                    }
                    graph.add_factor(vars).map_err(|e| err(e.to_string()))?;
                }
                other => return Err(err(format!("unknown record type `{other}`"))),
            }
        }
        Ok(graph)
    }
}
