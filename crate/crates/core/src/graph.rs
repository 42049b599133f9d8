//! Simple dynamic graph on a fixed node set, and the update-event model.

use std::fmt;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::num::Scalar;
use crate::weights::Weights;

/// Dense node index in `[0, n)`.
pub type NodeId = usize;

/// Unordered pair of distinct nodes, stored with the smaller endpoint first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "[u32; 2]", from = "[u32; 2]")]
pub struct Edge {
    lo: u32,
    hi: u32,
}

impl Edge {
    /// Normalizing constructor. Self-loops are a caller bug here; fallible
    /// paths go through [`Edge::checked`].
    pub fn new(a: NodeId, b: NodeId) -> Self {
        debug_assert_ne!(a, b, "self-loop");
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        Edge { lo: lo as u32, hi: hi as u32 }
    }

    pub fn checked(a: NodeId, b: NodeId, n: usize) -> Result<Self, GraphError> {
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        for node in [a, b] {
            if node >= n {
                return Err(GraphError::NodeOutOfRange { node, n });
            }
        }
        Ok(Edge::new(a, b))
    }

    #[inline]
    pub fn u(self) -> NodeId {
        self.lo as NodeId
    }

    #[inline]
    pub fn v(self) -> NodeId {
        self.hi as NodeId
    }

    #[inline]
    pub fn endpoints(self) -> [NodeId; 2] {
        [self.u(), self.v()]
    }

    /// The endpoint that is not `x`.
    #[inline]
    pub fn other(self, x: NodeId) -> NodeId {
        if x == self.u() {
            self.v()
        } else {
            debug_assert_eq!(x, self.v());
            self.u()
        }
    }

    #[inline]
    pub fn touches(self, x: NodeId) -> bool {
        self.u() == x || self.v() == x
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl From<Edge> for [u32; 2] {
    fn from(e: Edge) -> Self {
        [e.lo, e.hi]
    }
}

impl From<[u32; 2]> for Edge {
    fn from([a, b]: [u32; 2]) -> Self {
        Edge::new(a as NodeId, b as NodeId)
    }
}

/// Mutable simple graph `G = (V, E)` with `V = [0, n)` fixed at construction.
#[derive(Clone, Debug)]
pub struct DynGraph {
    adj: Vec<IndexSet<NodeId>>,
    edges: usize,
}

impl DynGraph {
    pub fn new(n: usize) -> Self {
        DynGraph { adj: vec![IndexSet::new(); n], edges: 0 }
    }

    pub fn from_edges<I: IntoIterator<Item = Edge>>(n: usize, edges: I) -> Result<Self, GraphError> {
        let mut g = DynGraph::new(n);
        for e in edges {
            g.insert(e)?;
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn contains(&self, e: Edge) -> bool {
        e.v() < self.adj.len() && self.adj[e.u()].contains(&e.v())
    }

    fn check_range(&self, e: Edge) -> Result<(), GraphError> {
        let n = self.adj.len();
        if e.v() >= n {
            return Err(GraphError::NodeOutOfRange { node: e.v(), n });
        }
        Ok(())
    }

    pub fn insert(&mut self, e: Edge) -> Result<(), GraphError> {
        self.check_range(e)?;
        if !self.adj[e.u()].insert(e.v()) {
            return Err(GraphError::DuplicateEdge(e));
        }
        self.adj[e.v()].insert(e.u());
        self.edges += 1;
        Ok(())
    }

    pub fn remove(&mut self, e: Edge) -> Result<(), GraphError> {
        self.check_range(e)?;
        if !self.adj[e.u()].swap_remove(&e.v()) {
            return Err(GraphError::MissingEdge(e));
        }
        self.adj[e.v()].swap_remove(&e.u());
        self.edges -= 1;
        Ok(())
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(IndexSet::len).max().unwrap_or(0)
    }

    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adj[v].iter().copied()
    }

    /// Every edge once, in adjacency order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| u < v).map(move |&v| Edge::new(u, v)))
    }

    /// Every edge once, sorted.
    pub fn sorted_edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = self.edges().collect();
        out.sort_unstable();
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.adj
            .iter()
            .enumerate()
            .all(|(u, nbrs)| nbrs.iter().all(|&v| v != u && self.adj[v].contains(&u)))
    }
}

/// One element of an update stream.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UpdateEvent {
    Insert { edge: Edge, weight: f64 },
    Delete { edge: Edge },
    SetWeight { edge: Edge, weight: f64 },
}

impl UpdateEvent {
    pub fn edge(&self) -> Edge {
        match *self {
            UpdateEvent::Insert { edge, .. }
            | UpdateEvent::Delete { edge }
            | UpdateEvent::SetWeight { edge, .. } => edge,
        }
    }

    /// Check the event against `g` without applying it.
    pub fn validate(&self, g: &DynGraph) -> Result<(), GraphError> {
        let edge = self.edge();
        let n = g.node_count();
        Edge::checked(edge.u(), edge.v(), n)?;
        match *self {
            UpdateEvent::Insert { weight, .. } | UpdateEvent::SetWeight { weight, .. }
                if !(0.0..=1.0).contains(&weight) =>
            {
                Err(GraphError::InvalidWeight { edge, weight })
            }
            UpdateEvent::Insert { .. } if g.contains(edge) => Err(GraphError::DuplicateEdge(edge)),
            UpdateEvent::Delete { .. } | UpdateEvent::SetWeight { .. } if !g.contains(edge) => {
                Err(GraphError::MissingEdge(edge))
            }
            _ => Ok(()),
        }
    }
}

/// Apply `ev` to the graph and its weight function. On error neither is touched.
pub fn apply_event<S: Scalar>(
    g: &mut DynGraph,
    w: &mut Weights<S>,
    ev: &UpdateEvent,
) -> Result<(), GraphError> {
    ev.validate(g)?;
    match *ev {
        UpdateEvent::Insert { edge, weight } => {
            let x = S::from_f64(weight).ok_or(GraphError::Unrepresentable(weight))?;
            g.insert(edge)?;
            w.set(edge, x);
        }
        UpdateEvent::Delete { edge } => {
            g.remove(edge)?;
            w.remove(edge);
        }
        UpdateEvent::SetWeight { edge, weight } => {
            let x = S::from_f64(weight).ok_or(GraphError::Unrepresentable(weight))?;
            w.set(edge, x);
        }
    }
    Ok(())
}
