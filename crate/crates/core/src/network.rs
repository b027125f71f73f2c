//! Trade networks: agents, alternatives, transaction-cost couplings and
//! scalar edge weights, plus the global value state they act on.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tropical::{ExtendedReal, Semiring, TropicalMatrix, Vector};

/// A broken modelling assumption. Indices are stored 0-based and displayed
/// 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `[W]_{u,v} != [W]_{v,u}`.
    AsymmetricWeight { u: usize, v: usize },
    /// Finite weight on a pair that is not an edge (including the diagonal).
    WeightOffEdge { u: usize, v: usize },
    /// Edge carrying an infinite weight.
    MissingWeight { u: usize, v: usize },
    /// `A_{from,to}` has a row without a finite entry.
    EmptyRow { from: usize, to: usize, row: usize },
    /// `A_{from,to}` has a column without a finite entry.
    EmptyColumn { from: usize, to: usize, col: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::AsymmetricWeight { u, v } => write!(f, "W is not symmetric at ({}, {})", u + 1, v + 1),
            Violation::WeightOffEdge { u, v } => {
                write!(f, "W is finite at ({}, {}) which is not an edge", u + 1, v + 1)
            }
            Violation::MissingWeight { u, v } => write!(f, "W is infinite on edge ({}, {})", u + 1, v + 1),
            Violation::EmptyRow { from, to, row } => {
                write!(
                    f,
                    "A({}, {}) is not doubly G-astic: row {} has no finite entry",
                    from + 1,
                    to + 1,
                    row + 1
                )
            }
            Violation::EmptyColumn { from, to, col } => {
                write!(
                    f,
                    "A({}, {}) is not doubly G-astic: column {} has no finite entry",
                    from + 1,
                    to + 1,
                    col + 1
                )
            }
        }
    }
}

/// Suspicious but admissible data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Warning {
    NegativeWeight { u: usize, v: usize },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Warning::NegativeWeight { u, v } => write!(f, "negative weight on edge ({}, {})", u + 1, v + 1),
        }
    }
}

/// Undirected trade graph with a max-plus coupling matrix for each edge
/// direction and a symmetric min-plus weight matrix `W`.
///
/// Construction only enforces structural consistency (indices, shapes,
/// both directions present). The modelling assumptions are checked by
/// [`TradeNetwork::validate`] so pathological instances can still be loaded.
#[derive(Clone, Debug, PartialEq)]
pub struct TradeNetwork<T> {
    n_agents: usize,
    n_alternatives: usize,
    edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    // [A_{u,v}, A_{v,u}] for edge (u, v) with u < v.
    couplings: Vec<[TropicalMatrix<T>; 2]>,
    adjacency: Vec<Vec<Neighbor>>,
    weights: TropicalMatrix<T>,
}

/// One entry of an agent's neighbourhood.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Neighbor {
    pub agent: usize,
    pub edge: usize,
}

impl<T: Scalar> TradeNetwork<T> {
    /// `couplings` must hold exactly the matrices `A_{u,v}` and `A_{v,u}`
    /// for every edge `{u, v}`, each `d x d` and max-plus.
    pub fn new(
        n_agents: usize,
        n_alternatives: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        mut couplings: BTreeMap<(usize, usize), TropicalMatrix<T>>,
        weights: TropicalMatrix<T>,
    ) -> Result<Self> {
        if n_agents == 0 || n_alternatives == 0 {
            return Err(Error::EmptyShape);
        }
        let mut canon: Vec<(usize, usize)> = Vec::new();
        for (u, v) in edges {
            if u >= n_agents || v >= n_agents {
                return Err(Error::InvalidNetwork(format!(
                    "edge ({u}, {v}) references an agent outside 0..{n_agents}"
                )));
            }
            if u == v {
                return Err(Error::InvalidNetwork(format!("self-loop at agent {u}")));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidNetwork(format!("duplicate edge {:?}", w[0])));
        }

        if weights.shape() != (n_agents, n_agents) {
            return Err(Error::DimensionMismatch {
                op: "TradeNetwork::new (W)",
                left: (n_agents, n_agents),
                right: weights.shape(),
            });
        }
        if weights.semiring() != Semiring::MinPlus {
            return Err(Error::SemiringMismatch {
                op: "TradeNetwork::new (W)",
                expected: Semiring::MinPlus,
                found: weights.semiring(),
            });
        }

        let mut take = |from: usize, to: usize| -> Result<TropicalMatrix<T>> {
            let a = couplings
                .remove(&(from, to))
                .ok_or_else(|| Error::InvalidNetwork(format!("missing coupling matrix A({from}, {to})")))?;
            if a.shape() != (n_alternatives, n_alternatives) {
                return Err(Error::DimensionMismatch {
                    op: "TradeNetwork::new (A)",
                    left: (n_alternatives, n_alternatives),
                    right: a.shape(),
                });
            }
            if a.semiring() != Semiring::MaxPlus {
                return Err(Error::SemiringMismatch {
                    op: "TradeNetwork::new (A)",
                    expected: Semiring::MaxPlus,
                    found: a.semiring(),
                });
            }
            Ok(a)
        };
        let mut pairs = Vec::with_capacity(canon.len());
        for &(u, v) in &canon {
            pairs.push([take(u, v)?, take(v, u)?]);
        }
        if let Some((&(u, v), _)) = couplings.iter().next() {
            return Err(Error::InvalidNetwork(format!(
                "coupling matrix A({u}, {v}) given for a non-edge"
            )));
        }

        let mut adjacency = vec![Vec::new(); n_agents];
        let mut edge_index = HashMap::with_capacity(canon.len());
        for (e, &(u, v)) in canon.iter().enumerate() {
            adjacency[u].push(Neighbor { agent: v, edge: e });
            adjacency[v].push(Neighbor { agent: u, edge: e });
            edge_index.insert((u, v), e);
        }
        for list in &mut adjacency {
            list.sort_unstable_by_key(|n| n.agent);
        }

        Ok(TradeNetwork {
            n_agents,
            n_alternatives,
            edges: canon,
            edge_index,
            couplings: pairs,
            adjacency,
            weights,
        })
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn n_alternatives(&self) -> usize {
        self.n_alternatives
    }

    /// Undirected edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, u: usize) -> &[Neighbor] {
        &self.adjacency[u]
    }

    pub fn weights(&self) -> &TropicalMatrix<T> {
        &self.weights
    }

    pub fn weight(&self, u: usize, v: usize) -> ExtendedReal<T> {
        self.weights.get(u, v)
    }

    pub fn is_edge(&self, u: usize, v: usize) -> bool {
        self.edge_index.contains_key(&(u.min(v), u.max(v)))
    }

    /// `A_{u,v}`: the transaction values agent `u` faces when trading with `v`.
    pub fn coupling(&self, u: usize, v: usize) -> Option<&TropicalMatrix<T>> {
        let e = *self.edge_index.get(&(u.min(v), u.max(v)))?;
        Some(self.coupling_on_edge(e, u))
    }

    /// `A_{from,to}` for the given edge, where `from` is one of its endpoints.
    #[inline]
    pub fn coupling_on_edge(&self, edge: usize, from: usize) -> &TropicalMatrix<T> {
        let (u, _) = self.edges[edge];
        &self.couplings[edge][usize::from(from != u)]
    }

    /// `ε = max_{uv ∈ E} [W]_{u,v}`, or `None` for an edgeless network.
    pub fn max_edge_weight(&self) -> Option<ExtendedReal<T>> {
        self.edges.iter().map(|&(u, v)| self.weight(u, v)).max()
    }

    /// Assumption checks: `W` symmetric with the sparsity pattern of the
    /// graph, every coupling doubly G-astic. Empty iff both hold.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.n_agents;
        for u in 0..n {
            for v in 0..n {
                let w = self.weight(u, v);
                if u < v && w != self.weight(v, u) {
                    out.push(Violation::AsymmetricWeight { u, v });
                }
                match (self.is_edge(u, v), w.is_pos_inf()) {
                    (false, false) => out.push(Violation::WeightOffEdge { u, v }),
                    (true, true) => out.push(Violation::MissingWeight { u, v }),
                    _ => {}
                }
            }
        }
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            for (from, to) in [(u, v), (v, u)] {
                let a = self.coupling_on_edge(e, from);
                out.extend(
                    a.empty_rows()
                        .into_iter()
                        .map(|row| Violation::EmptyRow { from, to, row }),
                );
                out.extend(
                    a.empty_cols()
                        .into_iter()
                        .map(|col| Violation::EmptyColumn { from, to, col }),
                );
            }
        }
        out
    }

    pub fn warnings(&self) -> Vec<Warning> {
        self.edges
            .iter()
            .filter(|&&(u, v)| self.weight(u, v) < ExtendedReal::zero())
            .map(|&(u, v)| Warning::NegativeWeight { u, v })
            .collect()
    }

    /// `A_{u,v} ⊞ X_u`: what agent `u` can realise for each alternative when
    /// negotiating with `v`, net of transaction costs.
    pub fn effective_value(&self, u: usize, v: usize, x_u: &Vector<T>) -> Result<Vector<T>> {
        self.coupling(u, v).ok_or(Error::NotAnEdge { u, v })?.mp_matvec(x_u)
    }

    /// `‖A_{u,v} ⊞ X_u − A_{v,u} ⊞ X_v‖∞`.
    pub fn value_residual(&self, u: usize, v: usize, x_u: &Vector<T>, x_v: &Vector<T>) -> Result<ExtendedReal<T>> {
        let left = self.effective_value(u, v, x_u)?;
        let right = self.effective_value(v, u, x_v)?;
        left.linf_distance(&right)
    }

    pub fn check_state(&self, x: &GlobalState<T>) -> Result<()> {
        if x.n_agents() != self.n_agents || x.dim() != self.n_alternatives {
            return Err(Error::DimensionMismatch {
                op: "state vs network",
                left: (self.n_agents, self.n_alternatives),
                right: (x.n_agents(), x.dim()),
            });
        }
        Ok(())
    }

    /// Whether the agents in `set` induce a connected subgraph. The empty
    /// set counts as connected.
    pub fn is_connected_subset(&self, set: &[usize]) -> bool {
        let Some(&start) = set.first() else {
            return true;
        };
        let member: std::collections::HashSet<usize> = set.iter().copied().collect();
        let mut seen = std::collections::HashSet::from([start]);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for nb in self.neighbors(u) {
                if member.contains(&nb.agent) && seen.insert(nb.agent) {
                    stack.push(nb.agent);
                }
            }
        }
        seen.len() == member.len()
    }
}

/// Fluent construction of a network whose weights are well-formed by
/// construction: `W` is filled symmetrically, `+inf` off the edges.
pub struct NetworkBuilder<T> {
    n_agents: usize,
    n_alternatives: usize,
    edges: Vec<(usize, usize)>,
    couplings: BTreeMap<(usize, usize), TropicalMatrix<T>>,
    weights: Vec<(usize, usize, ExtendedReal<T>)>,
}

impl<T: Scalar> NetworkBuilder<T> {
    pub fn new(n_agents: usize, n_alternatives: usize) -> Self {
        NetworkBuilder {
            n_agents,
            n_alternatives,
            edges: Vec::new(),
            couplings: BTreeMap::new(),
            weights: Vec::new(),
        }
    }

    pub fn edge(mut self, u: usize, v: usize, a_uv: TropicalMatrix<T>, a_vu: TropicalMatrix<T>, weight: T) -> Self {
        self.edges.push((u, v));
        self.couplings.insert((u, v), a_uv);
        self.couplings.insert((v, u), a_vu);
        self.weights.push((u, v, ExtendedReal::from(weight)));
        self
    }

    pub fn build(self) -> Result<TradeNetwork<T>> {
        let n = self.n_agents;
        if n == 0 {
            return Err(Error::EmptyShape);
        }
        let mut w = vec![ExtendedReal::PosInf; n * n];
        for &(u, v, x) in &self.weights {
            if u >= n || v >= n {
                return Err(Error::InvalidNetwork(format!("agent index out of range in ({u}, {v})")));
            }
            w[u * n + v] = x;
            w[v * n + u] = x;
        }
        let weights = TropicalMatrix::new(n, n, Semiring::MinPlus, w)?;
        TradeNetwork::new(n, self.n_alternatives, self.edges, self.couplings, weights)
    }
}

/// The stacked value vectors `X = (X_1, …, X_N)`, one per agent, all of the
/// same dimension and free of `+inf`.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalState<T> {
    dim: usize,
    blocks: Vec<Vector<T>>,
}

impl<T: Scalar> Eq for GlobalState<T> {}

impl<T: Scalar> GlobalState<T> {
    pub fn new(blocks: Vec<Vector<T>>) -> Result<Self> {
        let dim = blocks.first().map(Vector::len).ok_or(Error::EmptyShape)?;
        if dim == 0 {
            return Err(Error::EmptyShape);
        }
        for (agent, b) in blocks.iter().enumerate() {
            if b.len() != dim {
                return Err(Error::DimensionMismatch {
                    op: "GlobalState::new",
                    left: (dim, 1),
                    right: (b.len(), 1),
                });
            }
            if let Some(alternative) = b.iter().position(|e| e.is_pos_inf()) {
                return Err(Error::TopInState { agent, alternative });
            }
        }
        Ok(GlobalState { dim, blocks })
    }

    pub fn from_f64_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(rows.iter().map(|r| Vector::from_f64s(r)).collect())
    }

    /// All agents hold the bottom vector.
    pub fn bottom(n_agents: usize, dim: usize) -> Self {
        GlobalState {
            dim,
            blocks: vec![Vector::bottom(dim); n_agents],
        }
    }

    pub fn n_agents(&self) -> usize {
        self.blocks.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn block(&self, u: usize) -> &Vector<T> {
        &self.blocks[u]
    }

    pub fn blocks(&self) -> &[Vector<T>] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<Vector<T>> {
        self.blocks
    }

    pub fn get(&self, agent: usize, alternative: usize) -> ExtendedReal<T> {
        self.blocks[agent][alternative]
    }

    /// Replaces a single entry. `+inf` is rejected.
    pub fn with_entry(&self, agent: usize, alternative: usize, value: ExtendedReal<T>) -> Result<Self> {
        let mut blocks = self.blocks.clone();
        let mut entries = blocks[agent].clone().into_entries();
        entries[alternative] = value;
        blocks[agent] = Vector::new(entries);
        Self::new(blocks)
    }

    /// No entry is `-inf`.
    pub fn is_finite(&self) -> bool {
        self.blocks.iter().all(Vector::is_finite)
    }

    fn same_shape(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.n_agents() != other.n_agents() || self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                op,
                left: (self.n_agents(), self.dim),
                right: (other.n_agents(), other.dim),
            });
        }
        Ok(())
    }

    /// Stacked ℓ∞ distance over all blocks.
    pub fn linf_distance(&self, other: &Self) -> Result<ExtendedReal<T>> {
        self.same_shape(other, "linf_distance")?;
        let mut acc = ExtendedReal::zero();
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            acc = acc.join(a.linf_distance(b)?);
        }
        Ok(acc)
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "join")?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.join(b))
            .collect::<Result<_>>()?;
        Ok(GlobalState { dim: self.dim, blocks })
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "meet")?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.meet(b))
            .collect::<Result<_>>()?;
        Ok(GlobalState { dim: self.dim, blocks })
    }

    /// `X + α` on every entry.
    pub fn shift_by(&self, alpha: T) -> Self {
        GlobalState {
            dim: self.dim,
            blocks: self.blocks.iter().map(|b| b.shift_by(alpha)).collect(),
        }
    }

    pub fn leq(&self, other: &Self) -> bool {
        self.n_agents() == other.n_agents() && self.blocks.iter().zip(&other.blocks).all(|(a, b)| a.leq(b))
    }

    pub fn leq_tol(&self, other: &Self, tol: T) -> bool {
        self.n_agents() == other.n_agents() && self.blocks.iter().zip(&other.blocks).all(|(a, b)| a.leq_tol(b, tol))
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.n_agents() == other.n_agents() && self.blocks.iter().zip(&other.blocks).all(|(a, b)| a.approx_eq(b, tol))
    }

    /// Smallest finite entry, if any.
    pub fn min_finite(&self) -> Option<T> {
        self.blocks
            .iter()
            .flat_map(|b| b.iter().filter_map(|e| e.finite()))
            .fold(None, |acc: Option<T>, x| {
                Some(match acc {
                    Some(m) if m <= x => m,
                    _ => x,
                })
            })
    }
}
