//! Maximum cardinality matching (Edmonds' blossom algorithm) and maximum
//! fractional matching via the bipartite double cover.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::graph::{DynGraph, Edge, NodeId};
use crate::weights::Weights;

const NONE: usize = usize::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingResult {
    pub edges: Vec<Edge>,
}

impl MatchingResult {
    pub fn size(&self) -> usize {
        self.edges.len()
    }

    /// No two edges share an endpoint.
    pub fn is_matching(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.edges.iter().all(|e| seen.insert(e.u()) && seen.insert(e.v()))
    }
}

struct Blossom<'a> {
    adj: &'a [Vec<NodeId>],
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    queue: VecDeque<usize>,
}

impl Blossom<'_> {
    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.adj.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    /// Free node reachable from `root` by an augmenting path, with `parent`
    /// links describing the path.
    fn find_path(&mut self, root: usize) -> Option<usize> {
        let n = self.adj.len();
        self.used.iter_mut().for_each(|x| *x = false);
        self.parent.iter_mut().for_each(|x| *x = NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for &to in self.adj[v].iter() {
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let m = self.mate[to];
                    self.used[m] = true;
                    self.queue.push_back(m);
                }
            }
        }
        None
    }

    fn augment(&mut self, mut v: usize) {
        while v != NONE {
            let pv = self.parent[v];
            let next = self.mate[pv];
            self.mate[v] = pv;
            self.mate[pv] = v;
            v = next;
        }
    }
}

/// Maximum matching of the graph on `n` nodes with the given edges.
pub fn max_matching_edges(n: usize, edges: &[Edge]) -> MatchingResult {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.u()].push(e.v());
        adj[e.v()].push(e.u());
    }
    let mut b = Blossom {
        adj: &adj,
        mate: vec![NONE; n],
        parent: vec![NONE; n],
        base: (0..n).collect(),
        used: vec![false; n],
        in_blossom: vec![false; n],
        queue: VecDeque::new(),
    };
    for e in edges {
        if b.mate[e.u()] == NONE && b.mate[e.v()] == NONE {
            b.mate[e.u()] = e.v();
            b.mate[e.v()] = e.u();
        }
    }
    for root in 0..n {
        if b.mate[root] == NONE {
            if let Some(v) = b.find_path(root) {
                b.augment(v);
            }
        }
    }
    let edges = (0..n).filter(|&v| b.mate[v] != NONE && v < b.mate[v]).map(|v| Edge::new(v, b.mate[v])).collect();
    MatchingResult { edges }
}

/// `mu(g)`, exact on general graphs.
pub fn max_matching(g: &DynGraph) -> MatchingResult {
    max_matching_edges(g.node_count(), &g.sorted_edges())
}

/// Maximum bipartite matching from the left side by augmenting paths.
/// Returns `mate_left`.
fn bipartite_matching(left: usize, right: usize, adj: &[Vec<usize>]) -> Vec<usize> {
    let mut mate_l = vec![NONE; left];
    let mut mate_r = vec![NONE; right];
    let mut seen = vec![0usize; right];
    let mut stamp = 0;

    fn try_kuhn(
        v: usize,
        adj: &[Vec<usize>],
        mate_l: &mut [usize],
        mate_r: &mut [usize],
        seen: &mut [usize],
        stamp: usize,
    ) -> bool {
        for &r in &adj[v] {
            if seen[r] == stamp {
                continue;
            }
            seen[r] = stamp;
            if mate_r[r] == NONE || try_kuhn(mate_r[r], adj, mate_l, mate_r, seen, stamp) {
                mate_l[v] = r;
                mate_r[r] = v;
                return true;
            }
        }
        false
    }

    for v in 0..left {
        stamp += 1;
        try_kuhn(v, adj, &mut mate_l, &mut mate_r, &mut seen, stamp);
    }
    mate_l
}

fn double_cover_mates(n: usize, edges: &[Edge]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.u()].push(e.v());
        adj[e.v()].push(e.u());
    }
    bipartite_matching(n, n, &adj)
}

/// Half-integral maximum fractional matching: each edge carries half the
/// number of its two copies matched in the bipartite double cover.
pub fn max_fractional_matching_weights(n: usize, edges: &[Edge]) -> Weights<f64> {
    let mates = double_cover_mates(n, edges);
    let mut w = Weights::new(n);
    for (v, &m) in mates.iter().enumerate() {
        if m != NONE {
            let e = Edge::new(v, m);
            w.set(e, w.get(e) + 0.5);
        }
    }
    w
}

/// `mu_f(g)`: half the maximum matching of the bipartite double cover.
pub fn max_fractional_matching(g: &DynGraph) -> f64 {
    let mates = double_cover_mates(g.node_count(), &g.sorted_edges());
    mates.iter().filter(|&&m| m != NONE).count() as f64 / 2.0
}
