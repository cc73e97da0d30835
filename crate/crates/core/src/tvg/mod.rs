//! Periodic undirected time-varying graphs.
//!
//! A [`TemporalGraph`] is a fixed node set together with `p` undirected edge
//! sets, one per round of the period. Every time query is reduced modulo `p`.

mod generate;
mod tel;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generate::{generate_random, GenerateError, Plant};
pub use tel::{parse_tel, to_tel, TelError};

/// Identifier of a node. Need not be dense; must fit in the ID width of the graph.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

/// Number of bits used to encode an ID (and a degree) in a graph of `n` nodes:
/// `ceil(log2 n)`, never less than one.
pub fn id_width(n: usize) -> u32 {
    if n <= 2 {
        1
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("period must be positive")]
    ZeroPeriod,
    #[error("node count must be positive")]
    ZeroNodes,
    #[error("self-loop on node {node} at round {round}")]
    SelfLoop { round: usize, node: NodeId },
    #[error("duplicate edge {{{u},{v}}} at round {round}")]
    DuplicateEdge { round: usize, u: NodeId, v: NodeId },
    #[error("round {round} outside [0, {p})")]
    RoundOutOfRange { round: usize, p: usize },
    #[error("node id {id} does not fit in {width} bits (n = {n})")]
    IdTooWide { id: NodeId, n: usize, width: u32 },
    #[error("{found} distinct nodes but n = {n}")]
    TooManyNodes { found: usize, n: usize },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
}

/// Window length and tolerance of a (Δ,d)-twin query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemParams {
    delta: usize,
    d: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamsError {
    #[error("window length must be at least 1")]
    ZeroDelta,
    #[error("window length {delta} exceeds period {p}")]
    DeltaExceedsPeriod { delta: usize, p: usize },
}

impl ProblemParams {
    /// Validates `1 <= delta <= p`. Any non-negative `d` is accepted.
    pub fn new(delta: usize, d: usize, p: usize) -> Result<Self, ParamsError> {
        if delta == 0 {
            return Err(ParamsError::ZeroDelta);
        }
        if delta > p {
            return Err(ParamsError::DeltaExceedsPeriod { delta, p });
        }
        Ok(ProblemParams { delta, d })
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn d(&self) -> usize {
        self.d
    }
}

/// A p-periodic sequence of undirected edge sets over a fixed node set.
///
/// Immutable once built; cheap to share across threads.
#[derive(Clone, Debug)]
pub struct TemporalGraph {
    n: usize,
    p: usize,
    nodes: Vec<NodeId>,
    /// `edges[t]` holds pairs `(u, v)` with `u < v`.
    edges: Vec<BTreeSet<(NodeId, NodeId)>>,
    /// `adj[t][i]` is the sorted neighbour list of `nodes[i]` at round `t`.
    adj: Vec<Vec<Vec<NodeId>>>,
}

impl PartialEq for TemporalGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.p == other.p && self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Eq for TemporalGraph {}

impl TemporalGraph {
    pub fn builder(n: usize, p: usize) -> GraphBuilder {
        GraphBuilder {
            n,
            p,
            nodes: BTreeSet::new(),
            edges: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> usize {
        self.p
    }

    /// Sorted node identifiers.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn id_width(&self) -> u32 {
        id_width(self.n)
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.nodes.binary_search(&v).is_ok()
    }

    pub fn index_of(&self, v: NodeId) -> Result<usize, GraphError> {
        self.nodes
            .binary_search(&v)
            .map_err(|_| GraphError::UnknownNode(v))
    }

    /// Edges of round `t mod p`, each as `(u, v)` with `u < v`.
    pub fn edges_at(&self, t: usize) -> &BTreeSet<(NodeId, NodeId)> {
        &self.edges[t % self.p]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(BTreeSet::len).sum()
    }

    /// `N_{t mod p}(v)`.
    pub fn neighbours(&self, v: NodeId, t: usize) -> Result<BTreeSet<NodeId>, GraphError> {
        Ok(self.neighbour_slice(v, t)?.iter().copied().collect())
    }

    /// Sorted neighbours of `v` at `t mod p`, without allocating.
    pub fn neighbour_slice(&self, v: NodeId, t: usize) -> Result<&[NodeId], GraphError> {
        let i = self.index_of(v)?;
        Ok(&self.adj[t % self.p][i])
    }

    pub(crate) fn neighbours_by_index(&self, i: usize, t: usize) -> &[NodeId] {
        &self.adj[t % self.p][i]
    }

    pub fn degree(&self, v: NodeId, t: usize) -> Result<usize, GraphError> {
        Ok(self.neighbour_slice(v, t)?.len())
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId, t: usize) -> bool {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edges[t % self.p].contains(&key)
    }

    /// Maximum degree over every node and every round; zero when edgeless.
    pub fn max_degree(&self) -> usize {
        self.adj
            .iter()
            .flat_map(|round| round.iter().map(Vec::len))
            .max()
            .unwrap_or(0)
    }

    /// Same nodes, rounds shifted so that round `t` of the result is round
    /// `t + r` of `self`.
    pub fn rotate(&self, r: usize) -> TemporalGraph {
        let p = self.p;
        let edges: Vec<_> = (0..p).map(|t| self.edges[(t + r) % p].clone()).collect();
        let adj = (0..p).map(|t| self.adj[(t + r) % p].clone()).collect();
        TemporalGraph {
            n: self.n,
            p,
            nodes: self.nodes.clone(),
            edges,
            adj,
        }
    }
}

/// Incremental construction of a [`TemporalGraph`].
///
/// When fewer than `n` distinct nodes are named, the node set is padded with
/// the smallest unused identifiers so that the graph always has `n` nodes.
#[derive(Clone, Debug)]
pub struct GraphBuilder {
    n: usize,
    p: usize,
    nodes: BTreeSet<NodeId>,
    edges: Vec<(usize, NodeId, NodeId)>,
}

impl GraphBuilder {
    pub fn node(mut self, v: impl Into<NodeId>) -> Self {
        self.nodes.insert(v.into());
        self
    }

    pub fn edge(mut self, t: usize, u: impl Into<NodeId>, v: impl Into<NodeId>) -> Self {
        self.push_edge(t, u.into(), v.into());
        self
    }

    pub fn push_edge(&mut self, t: usize, u: NodeId, v: NodeId) {
        self.edges.push((t, u, v));
    }

    pub fn push_node(&mut self, v: NodeId) {
        self.nodes.insert(v);
    }

    pub fn build(self) -> Result<TemporalGraph, GraphError> {
        let GraphBuilder {
            n,
            p,
            mut nodes,
            edges,
        } = self;
        if p == 0 {
            return Err(GraphError::ZeroPeriod);
        }
        if n == 0 {
            return Err(GraphError::ZeroNodes);
        }
        let width = id_width(n);
        let check_id = |id: NodeId| {
            if u64::from(id.0) >> width != 0 {
                Err(GraphError::IdTooWide { id, n, width })
            } else {
                Ok(())
            }
        };

        let mut per_round: Vec<BTreeSet<(NodeId, NodeId)>> = vec![BTreeSet::new(); p];
        for &(t, u, v) in &edges {
            if t >= p {
                return Err(GraphError::RoundOutOfRange { round: t, p });
            }
            if u == v {
                return Err(GraphError::SelfLoop { round: t, node: u });
            }
            check_id(u)?;
            check_id(v)?;
            let key = if u < v { (u, v) } else { (v, u) };
            if !per_round[t].insert(key) {
                return Err(GraphError::DuplicateEdge {
                    round: t,
                    u: key.0,
                    v: key.1,
                });
            }
            nodes.insert(u);
            nodes.insert(v);
        }
        for &v in &nodes {
            check_id(v)?;
        }
        if nodes.len() > n {
            return Err(GraphError::TooManyNodes {
                found: nodes.len(),
                n,
            });
        }
        let mut next = 0u32;
        while nodes.len() < n {
            if nodes.insert(NodeId(next)) {
                check_id(NodeId(next))?;
            }
            next += 1;
        }

        let nodes: Vec<NodeId> = nodes.into_iter().collect();
        let index = |v: NodeId| nodes.binary_search(&v).expect("endpoint registered");
        let adj = per_round
            .iter()
            .map(|round| {
                let mut lists = vec![Vec::new(); nodes.len()];
                for &(u, v) in round {
                    lists[index(u)].push(v);
                    lists[index(v)].push(u);
                }
                for l in &mut lists {
                    l.sort_unstable();
                }
                lists
            })
            .collect();

        Ok(TemporalGraph {
            n,
            p,
            nodes,
            edges: per_round,
            adj,
        })
    }
}

/// Every unordered pair of distinct nodes, in node order.
pub fn unordered_pairs(nodes: &[NodeId]) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
    nodes
        .iter()
        .enumerate()
        .flat_map(move |(i, &u)| nodes[i + 1..].iter().map(move |&v| (u, v)))
}
