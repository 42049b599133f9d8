//! Sparse weight functions `E' -> [0, 1]` over a fixed node set.

use indexmap::IndexMap;

use crate::error::GraphError;
use crate::graph::{DynGraph, Edge, NodeId};
use crate::num::Scalar;

/// Sparse edge weights with O(1) access to every node sum `w(v)`.
///
/// Only nonzero weights are stored; the stored keys are the support.
#[derive(Clone, Debug)]
pub struct Weights<S> {
    adj: Vec<IndexMap<NodeId, S>>,
    node_sum: Vec<S>,
    len: usize,
}

impl<S: Scalar> Weights<S> {
    pub fn new(n: usize) -> Self {
        Weights { adj: vec![IndexMap::new(); n], node_sum: vec![S::zero(); n], len: 0 }
    }

    pub fn from_pairs<I: IntoIterator<Item = (Edge, S)>>(n: usize, pairs: I) -> Self {
        let mut w = Weights::new(n);
        for (e, x) in pairs {
            w.set(e, x);
        }
        w
    }

    /// `x` on every edge of `edges`.
    pub fn uniform<I: IntoIterator<Item = Edge>>(n: usize, edges: I, x: S) -> Self {
        Weights::from_pairs(n, edges.into_iter().map(|e| (e, x)))
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Number of support edges.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, e: Edge) -> S {
        self.adj[e.u()].get(&e.v()).copied().unwrap_or_else(S::zero)
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.adj[e.u()].contains_key(&e.v())
    }

    /// Set `w(e) = x`; a zero weight drops `e` from the support.
    pub fn set(&mut self, e: Edge, x: S) {
        if x.is_zero() {
            self.remove(e);
            return;
        }
        let old = self.adj[e.u()].insert(e.v(), x);
        self.adj[e.v()].insert(e.u(), x);
        let delta = match old {
            Some(prev) => x - prev,
            None => {
                self.len += 1;
                x
            }
        };
        self.node_sum[e.u()] = self.node_sum[e.u()] + delta;
        self.node_sum[e.v()] = self.node_sum[e.v()] + delta;
    }

    pub fn remove(&mut self, e: Edge) -> Option<S> {
        let old = self.adj[e.u()].swap_remove(&e.v())?;
        self.adj[e.v()].swap_remove(&e.u());
        self.len -= 1;
        self.node_sum[e.u()] = self.node_sum[e.u()] - old;
        self.node_sum[e.v()] = self.node_sum[e.v()] - old;
        Some(old)
    }

    /// `w(v)`, maintained incrementally.
    pub fn node_weight(&self, v: NodeId) -> S {
        self.node_sum[v]
    }

    /// `w(v)` summed from scratch over the support edges at `v`.
    pub fn node_weight_recomputed(&self, v: NodeId) -> S {
        S::sum_iter(self.adj[v].values().copied())
    }

    pub fn size(&self) -> S {
        S::sum_iter(self.iter().map(|(_, x)| x))
    }

    /// Support edges with their weights.
    pub fn iter(&self) -> impl Iterator<Item = (Edge, S)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, row)| {
            row.iter().filter(move |(&v, _)| u < v).map(move |(&v, &x)| (Edge::new(u, v), x))
        })
    }

    pub fn support(&self) -> impl Iterator<Item = Edge> + '_ {
        self.iter().map(|(e, _)| e)
    }

    /// Weighted incident edges of `v`.
    pub fn incident(&self, v: NodeId) -> impl Iterator<Item = (NodeId, S)> + '_ {
        self.adj[v].iter().map(|(&u, &x)| (u, x))
    }

    pub fn max_edge_weight(&self) -> S {
        self.iter().map(|(_, x)| x).fold(S::zero(), S::max_of)
    }

    /// Convert every weight into another scalar type.
    pub fn convert<T: Scalar>(&self, f: impl Fn(S) -> T) -> Weights<T> {
        Weights::from_pairs(self.node_count(), self.iter().map(|(e, x)| (e, f(x))))
    }

    /// Whether `w(v) <= 1` (up to tolerance) for every node, i.e. `w` is a
    /// fractional matching in `g`. Errors if the support leaves `g`.
    pub fn validate_fractional(&self, g: &DynGraph) -> Result<bool, GraphError> {
        if let Some(e) = self.support().find(|&e| !g.contains(e)) {
            return Err(GraphError::SupportOutsideGraph(e));
        }
        Ok(self.is_fractional_matching())
    }

    /// Node-capacity check alone, without reference to a graph.
    pub fn is_fractional_matching(&self) -> bool {
        (0..self.node_count()).all(|v| self.node_weight(v).le_tol(S::one()))
    }
}

impl<S: Scalar> PartialEq for Weights<S> {
    fn eq(&self, other: &Self) -> bool {
        self.node_count() == other.node_count()
            && self.len == other.len
            && self.iter().all(|(e, x)| other.contains(e) && other.get(e) == x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn e(a: NodeId, b: NodeId) -> Edge {
        Edge::new(a, b)
    }

    fn triangle() -> DynGraph {
        DynGraph::from_edges(3, [e(0, 1), e(1, 2), e(0, 2)]).unwrap()
    }

    #[test]
    fn star_center_weight() {
        let w = Weights::uniform(4, [e(0, 1), e(0, 2), e(0, 3)], 0.2f64);
        assert!((w.node_weight(0) - 0.6).abs() < 1e-12);
        assert!((w.node_weight(1) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn isolated_node_has_zero_weight() {
        let w = Weights::uniform(5, [e(0, 1)], 0.4);
        assert_eq!(w.node_weight(4), 0.0);
    }

    #[test]
    fn triangle_half_weights() {
        let w = Weights::uniform(3, triangle().edges(), Rational64::new(1, 2));
        for v in 0..3 {
            assert_eq!(w.node_weight(v), Rational64::from_integer(1));
        }
        assert!(w.validate_fractional(&triangle()).unwrap());
        assert_eq!(w.size(), Rational64::new(3, 2));
    }

    #[test]
    fn triangle_overloaded() {
        let w = Weights::uniform(3, triangle().edges(), 0.6);
        assert!(!w.validate_fractional(&triangle()).unwrap());
    }

    #[test]
    fn empty_weight_function_is_valid() {
        let w = Weights::<f64>::new(3);
        assert!(w.validate_fractional(&triangle()).unwrap());
    }

    #[test]
    fn support_must_lie_in_graph() {
        let g = DynGraph::from_edges(4, [e(0, 1)]).unwrap();
        let w = Weights::uniform(4, [e(2, 3)], 0.1);
        assert_eq!(w.validate_fractional(&g), Err(GraphError::SupportOutsideGraph(e(2, 3))));
    }

    #[test]
    fn zero_weight_leaves_support() {
        let mut w = Weights::uniform(3, [e(0, 1)], 0.3);
        w.set(e(0, 1), 0.0);
        assert!(w.is_empty());
        assert_eq!(w.node_weight(0), 0.0);
    }
}
