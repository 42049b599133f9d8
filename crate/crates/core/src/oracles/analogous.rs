//! Static recomputation of a hierarchy that has absorbed deletions.
//!
//! Start from the active edges plus every dead edge, and run the peel and
//! split rounds from scratch. A dead edge of level `k` takes part in rounds
//! `0..=k` and is removed at the start of round `k + 1`. The result must
//! match the live hierarchy exactly, set for set.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::degree_split::degree_split;
use crate::graph::{Edge, NodeId};
use crate::uniform::HierarchySnapshot;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalogousStaticInput {
    pub n: usize,
    /// `E_(a)`
    pub active: Vec<Edge>,
    /// `D^(>=i)` for `i` in `[0, L]`, nested and disjoint from `active`.
    pub dead: Vec<Vec<Edge>>,
    /// `L`
    pub top: usize,
    /// Peel threshold `floor(1/eps)`.
    pub tau: usize,
}

impl AnalogousStaticInput {
    pub fn is_laminar(&self) -> bool {
        let sets: Vec<BTreeSet<Edge>> = self.dead.iter().map(|d| d.iter().copied().collect()).collect();
        let active: BTreeSet<Edge> = self.active.iter().copied().collect();
        sets.windows(2).all(|w| w[1].is_subset(&w[0])) && sets.first().is_none_or(|d0| d0.is_disjoint(&active))
    }
}

/// FIFO peel over an explicit adjacency map: seed every node of residual
/// degree `<= tau` in ascending order, then enqueue neighbors (ascending) as
/// they reach the threshold.
fn peel_round(nodes: &BTreeSet<NodeId>, edges: &BTreeSet<Edge>, tau: usize) -> Vec<NodeId> {
    let mut adj: BTreeMap<NodeId, BTreeSet<NodeId>> = nodes.iter().map(|&v| (v, BTreeSet::new())).collect();
    for e in edges {
        adj.get_mut(&e.u()).unwrap().insert(e.v());
        adj.get_mut(&e.v()).unwrap().insert(e.u());
    }
    let mut deg: BTreeMap<NodeId, usize> = adj.iter().map(|(&v, s)| (v, s.len())).collect();
    let mut queued: BTreeSet<NodeId> = BTreeSet::new();
    let mut queue = VecDeque::new();
    for (&v, &d) in &deg {
        if d <= tau {
            queued.insert(v);
            queue.push_back(v);
        }
    }
    let mut removed = BTreeSet::new();
    let mut order = Vec::new();
    while let Some(x) = queue.pop_front() {
        removed.insert(x);
        order.push(x);
        for &y in &adj[&x] {
            if removed.contains(&y) {
                continue;
            }
            let d = deg.get_mut(&y).unwrap();
            *d -= 1;
            if *d <= tau && queued.insert(y) {
                queue.push_back(y);
            }
        }
    }
    order
}

/// The hierarchy a from-scratch run produces on `input`.
pub fn analogous_static_hierarchy(input: &AnalogousStaticInput) -> HierarchySnapshot {
    let top = input.top;
    let levels = top + 1;
    let dead: Vec<BTreeSet<Edge>> = input.dead.iter().map(|d| d.iter().copied().collect()).collect();
    let mut edges: BTreeSet<Edge> = input.active.iter().copied().collect();
    edges.extend(dead[0].iter().copied());
    let mut nodes: BTreeSet<NodeId> = (0..input.n).collect();

    let mut snap = HierarchySnapshot {
        top,
        edges_at_least: Vec::with_capacity(levels),
        nodes_at_least: Vec::with_capacity(levels),
        nodes: Vec::with_capacity(levels),
        frozen: Vec::with_capacity(levels),
        dead_at_least: Vec::with_capacity(levels),
        node_level: vec![0; input.n],
        node_order: vec![0; input.n],
    };

    for i in 0..=top {
        if i > 0 {
            // edges that went missing in round i
            edges.retain(|e| !(dead[i - 1].contains(e) && !dead[i].contains(e)));
        }
        snap.edges_at_least.push(edges.clone());
        snap.nodes_at_least.push(nodes.clone());
        snap.dead_at_least.push(dead[i].intersection(&edges).copied().collect());

        let peeled = if i < top { peel_round(&nodes, &edges, input.tau) } else { nodes.iter().copied().collect() };
        for (pos, &v) in peeled.iter().enumerate() {
            snap.node_level[v] = i;
            snap.node_order[v] = pos;
        }
        let layer: BTreeSet<NodeId> = peeled.iter().copied().collect();
        let (frozen, rest): (Vec<Edge>, Vec<Edge>) =
            edges.iter().partition(|e| layer.contains(&e.u()) || layer.contains(&e.v()));
        snap.frozen.push(frozen.into_iter().collect());
        snap.nodes.push(peeled);
        nodes.retain(|v| !layer.contains(v));
        edges = degree_split(&rest).into_iter().collect();
    }
    snap
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(a: NodeId, b: NodeId) -> Edge {
        Edge::new(a, b)
    }

    fn complete(n: usize) -> Vec<Edge> {
        (0..n).flat_map(|a| (a + 1..n).map(move |b| e(a, b))).collect()
    }

    #[test]
    fn low_degree_peels_at_once() {
        let input = AnalogousStaticInput {
            n: 4,
            active: vec![e(0, 1), e(1, 2)],
            dead: vec![vec![]; 3],
            top: 2,
            tau: 5,
        };
        let s = analogous_static_hierarchy(&input);
        assert_eq!(s.nodes[0], vec![0, 1, 2, 3]);
        assert_eq!(s.frozen[0].len(), 2);
        assert!(s.edges_at_least[1].is_empty());
    }

    #[test]
    fn dead_edge_goes_missing_after_its_level() {
        let all = complete(12);
        let base = AnalogousStaticInput { n: 12, active: all.clone(), dead: vec![vec![]; 3], top: 2, tau: 3 };
        let s = analogous_static_hierarchy(&base);
        // an edge that survives into round 1 but is dead from round 1 on
        let x = *s.edges_at_least[1].iter().next().unwrap();
        let active: Vec<Edge> = all.into_iter().filter(|&y| y != x).collect();
        let input = AnalogousStaticInput { n: 12, active, dead: vec![vec![x], vec![x], vec![]], top: 2, tau: 3 };
        assert!(input.is_laminar());
        let t = analogous_static_hierarchy(&input);
        assert!(t.edges_at_least[1].contains(&x));
        assert!(!t.edges_at_least[2].contains(&x));
        assert_eq!(t.dead_at_least[1].len(), 1);
        // rounds 0 and 1 see the same edge sets as before
        assert_eq!(t.edges_at_least[..2], s.edges_at_least[..2]);
    }
}
