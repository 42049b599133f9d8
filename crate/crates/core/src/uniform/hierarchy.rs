//! Level structure built by repeated peel-and-split rounds.
//!
//! Every edge in the structure carries its level `l(e)`: the last round whose
//! edge set `E^(>=i)` contains it. An edge is either frozen at its level
//! (it touched a peeled node) or was dropped by the degree split of that
//! round. A deleted edge stays in place as *dead* until a clean-up; since it
//! joins every `D^(>=i)` with `i <= l(e)`, a per-edge flag is enough to
//! represent the whole nested family of dead sets.

use std::collections::{BTreeSet, HashMap, VecDeque};

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::degree_split::degree_split;
use crate::graph::{Edge, NodeId};

/// Per-edge state inside the hierarchy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeStatus {
    pub level: usize,
    pub frozen: bool,
    pub dead: bool,
}

/// Field-by-field view of a hierarchy, used for equivalence checks.
///
/// Level-`i` vectors have `L + 1` entries.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierarchySnapshot {
    pub top: usize,
    /// `E^(>=i)`
    pub edges_at_least: Vec<BTreeSet<Edge>>,
    /// `V^(>=i)`
    pub nodes_at_least: Vec<BTreeSet<NodeId>>,
    /// `V^(i)` in peel order
    pub nodes: Vec<Vec<NodeId>>,
    /// `F^(i)`
    pub frozen: Vec<BTreeSet<Edge>>,
    /// `D^(>=i)`
    pub dead_at_least: Vec<BTreeSet<Edge>>,
    pub node_level: Vec<usize>,
    pub node_order: Vec<usize>,
}

impl HierarchySnapshot {
    /// Names of the fields that differ from `other`, for diagnostics.
    pub fn diff(&self, other: &Self) -> Vec<String> {
        let mut out = Vec::new();
        if self.top != other.top {
            out.push(format!("top {} vs {}", self.top, other.top));
            return out;
        }
        for i in 0..=self.top {
            let fields = [
                ("E>=", self.edges_at_least[i] != other.edges_at_least[i]),
                ("V>=", self.nodes_at_least[i] != other.nodes_at_least[i]),
                ("V", self.nodes[i] != other.nodes[i]),
                ("F", self.frozen[i] != other.frozen[i]),
                ("D>=", self.dead_at_least[i] != other.dead_at_least[i]),
            ];
            for (name, differs) in fields {
                if differs {
                    out.push(format!("{name}{i}"));
                }
            }
        }
        if self.node_level != other.node_level {
            out.push("node_level".into());
        }
        if self.node_order != other.node_order {
            out.push("node_order".into());
        }
        out
    }
}

/// Result of one peeling pass.
pub struct Peel {
    /// Peeled nodes in peel order.
    pub peeled: Vec<NodeId>,
    /// Remaining nodes, ascending.
    pub survivors: Vec<NodeId>,
    /// Nodes with at least one edge.
    pub touched: usize,
}

/// Repeatedly remove nodes of residual degree `<= tau`.
///
/// `nodes` must be ascending and `edges` sorted, with every endpoint in
/// `nodes`. The queue is seeded in ascending id order and a neighbor is
/// enqueued the moment its residual degree reaches `tau`; neighbors are
/// visited in ascending order.
pub fn peel(nodes: &[NodeId], edges: &[Edge], tau: usize) -> Peel {
    let local: HashMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let k = nodes.len();
    let mut deg = vec![0usize; k];
    for e in edges {
        deg[local[&e.u()]] += 1;
        deg[local[&e.v()]] += 1;
    }
    let mut offsets = vec![0usize; k + 1];
    for i in 0..k {
        offsets[i + 1] = offsets[i] + deg[i];
    }
    // sorted edges give ascending neighbor lists: (a, x) with a < x come
    // first, grouped by a, then (x, b) in the group of x
    let mut fill = offsets.clone();
    let mut nbrs = vec![0usize; offsets[k]];
    for e in edges {
        let (a, b) = (local[&e.u()], local[&e.v()]);
        nbrs[fill[a]] = b;
        fill[a] += 1;
        nbrs[fill[b]] = a;
        fill[b] += 1;
    }

    let mut queued = vec![false; k];
    let mut removed = vec![false; k];
    let mut queue = VecDeque::new();
    for x in 0..k {
        if deg[x] <= tau {
            queued[x] = true;
            queue.push_back(x);
        }
    }
    let mut peeled = Vec::new();
    while let Some(x) = queue.pop_front() {
        removed[x] = true;
        peeled.push(nodes[x]);
        for &y in &nbrs[offsets[x]..offsets[x + 1]] {
            if removed[y] {
                continue;
            }
            deg[y] -= 1;
            if !queued[y] && deg[y] <= tau {
                queued[y] = true;
                queue.push_back(y);
            }
        }
    }
    let touched = offsets.windows(2).filter(|w| w[1] > w[0]).count();
    let survivors = (0..k).filter(|&x| !queued[x]).map(|x| nodes[x]).collect();
    Peel { peeled, survivors, touched }
}

/// The sets `E^(>=i)`, `V^(i)`, `F^(i)`, `D^(>=i)` for `i` in `[0, L]`.
#[derive(Clone, Debug)]
pub struct Hierarchy {
    top: usize,
    tau: usize,
    node_level: Vec<usize>,
    node_order: Vec<usize>,
    /// `V^(i)` in peel order
    level_nodes: Vec<Vec<NodeId>>,
    status: HashMap<Edge, EdgeStatus>,
    /// edges with `l(e) = i`
    level_edges: Vec<IndexSet<Edge>>,
    /// dead edges with `l(e) = i`
    level_dead: Vec<IndexSet<Edge>>,
}

impl Hierarchy {
    /// Hierarchy of an edgeless graph: every node peels in round 0.
    pub fn new(n: usize, top: usize, tau: usize) -> Self {
        let mut level_nodes = vec![Vec::new(); top + 1];
        level_nodes[0] = (0..n).collect();
        Hierarchy {
            top,
            tau,
            node_level: vec![0; n],
            node_order: (0..n).collect(),
            level_nodes,
            status: HashMap::new(),
            level_edges: vec![IndexSet::new(); top + 1],
            level_dead: vec![IndexSet::new(); top + 1],
        }
    }

    /// `L`.
    pub fn top(&self) -> usize {
        self.top
    }

    pub fn peel_threshold(&self) -> usize {
        self.tau
    }

    pub fn node_count(&self) -> usize {
        self.node_level.len()
    }

    pub fn node_level(&self, v: NodeId) -> usize {
        self.node_level[v]
    }

    /// Position of `v` in the peel order of its level.
    pub fn node_order(&self, v: NodeId) -> usize {
        self.node_order[v]
    }

    pub fn status(&self, e: Edge) -> Option<EdgeStatus> {
        self.status.get(&e).copied()
    }

    /// Every edge in `E^(>=0)` with its status.
    pub fn edges(&self) -> impl Iterator<Item = (Edge, EdgeStatus)> + '_ {
        self.status.iter().map(|(&e, &s)| (e, s))
    }

    /// `V^(i)` in peel order.
    pub fn level_nodes(&self, i: usize) -> &[NodeId] {
        &self.level_nodes[i]
    }

    /// Edges with `l(e) = i`, in no particular order.
    pub fn level_edges(&self, i: usize) -> impl Iterator<Item = Edge> + '_ {
        self.level_edges[i].iter().copied()
    }

    /// Number of edges with `l(e) = i`.
    pub fn level_edge_count(&self, i: usize) -> usize {
        self.level_edges[i].len()
    }

    /// Number of dead edges with `l(e) = i`.
    pub fn level_dead_count(&self, i: usize) -> usize {
        self.level_dead[i].len()
    }

    /// `|E^(>=i)|`.
    pub fn edges_at_least(&self, i: usize) -> usize {
        self.level_edges[i..].iter().map(IndexSet::len).sum()
    }

    /// `|D^(>=i)|`.
    pub fn dead_at_least(&self, i: usize) -> usize {
        self.level_dead[i..].iter().map(IndexSet::len).sum()
    }

    /// `sum_i |D^(>=i)| = sum over dead e of (l(e) + 1)`.
    pub fn dead_weight(&self) -> usize {
        self.level_dead.iter().enumerate().map(|(i, d)| (i + 1) * d.len()).sum()
    }

    /// `E^(>=i)`, sorted.
    pub fn sorted_edges_from(&self, i: usize) -> Vec<Edge> {
        let mut out: Vec<Edge> = self.level_edges[i..].iter().flatten().copied().collect();
        out.sort_unstable();
        out
    }

    /// `V^(>=i)`, ascending.
    pub fn sorted_nodes_from(&self, i: usize) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self.level_nodes[i..].iter().flatten().copied().collect();
        out.sort_unstable();
        out
    }

    /// Frozen live edges with level `>= i`, i.e. the part of `F_(a)` that a
    /// rebuild from `i` may change.
    pub fn live_frozen_from(&self, i: usize) -> Vec<Edge> {
        self.level_edges[i..]
            .iter()
            .flatten()
            .copied()
            .filter(|e| {
                let s = self.status[e];
                s.frozen && !s.dead
            })
            .collect()
    }

    /// Mark `e` dead; returns its level. `None` if `e` is absent or already dead.
    pub fn mark_dead(&mut self, e: Edge) -> Option<usize> {
        let s = self.status.get_mut(&e)?;
        if s.dead {
            return None;
        }
        s.dead = true;
        self.level_dead[s.level].insert(e);
        Some(s.level)
    }

    /// Drop every dead edge from `E^(>=i)` and `F^(i)` for `i >= j`. A dead
    /// edge of level `>= j` ends at level `j - 1` as a dropped edge (or leaves
    /// the structure when `j = 0`). Returns the number of cleared memberships,
    /// `sum_{i >= j} |D^(>=i)|`.
    pub fn clean_up(&mut self, j: usize) -> usize {
        let mut cleared = 0;
        for i in j..=self.top {
            let dead = std::mem::take(&mut self.level_dead[i]);
            cleared += dead.len() * (i - j + 1);
            for e in dead {
                self.level_edges[i].swap_remove(&e);
                if j == 0 {
                    self.status.remove(&e);
                } else {
                    self.status.insert(e, EdgeStatus { level: j - 1, frozen: false, dead: true });
                    self.level_edges[j - 1].insert(e);
                    self.level_dead[j - 1].insert(e);
                }
            }
        }
        cleared
    }

    /// Recompute levels `from..=L` from `edges = E^(>=from)` (sorted, no dead
    /// edges). Returns the work spent: the number of edges plus non-isolated
    /// nodes handled in each round.
    pub fn rebuild(&mut self, from: usize, mut edges: Vec<Edge>) -> u64 {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        let mut nodes = self.sorted_nodes_from(from);
        for i in from..=self.top {
            for e in self.level_edges[i].drain(..) {
                self.status.remove(&e);
            }
            debug_assert!(self.level_dead[i].is_empty(), "rebuild over dead edges");
            self.level_nodes[i].clear();
        }
        let mut work = 0u64;
        for i in from..self.top {
            let Peel { peeled, survivors, touched } = peel(&nodes, &edges, self.tau);
            work += (touched + edges.len()) as u64;
            for (pos, &v) in peeled.iter().enumerate() {
                self.node_level[v] = i;
                self.node_order[v] = pos;
            }
            self.level_nodes[i] = peeled;
            // provisional; overwritten by a later round
            for &v in &survivors {
                self.node_level[v] = i + 1;
            }
            let mut rest = Vec::with_capacity(edges.len());
            for e in edges {
                if self.node_level[e.u()] == i || self.node_level[e.v()] == i {
                    self.place(e, i, true);
                } else {
                    rest.push(e);
                }
            }
            let mut next = degree_split(&rest);
            next.sort_unstable();
            // rest \ next is dropped at level i
            let mut k = 0;
            for e in rest {
                if k < next.len() && next[k] == e {
                    k += 1;
                } else {
                    self.place(e, i, false);
                }
            }
            nodes = survivors;
            edges = next;
        }
        let mut ends: Vec<NodeId> = edges.iter().flat_map(|e| e.endpoints()).collect();
        ends.sort_unstable();
        ends.dedup();
        work += (ends.len() + edges.len()) as u64;
        for (pos, &v) in nodes.iter().enumerate() {
            self.node_level[v] = self.top;
            self.node_order[v] = pos;
        }
        self.level_nodes[self.top] = nodes;
        for e in edges {
            self.place(e, self.top, true);
        }
        work
    }

    fn place(&mut self, e: Edge, level: usize, frozen: bool) {
        self.status.insert(e, EdgeStatus { level, frozen, dead: false });
        self.level_edges[level].insert(e);
    }

    pub fn snapshot(&self) -> HierarchySnapshot {
        let levels = self.top + 1;
        let mut snap = HierarchySnapshot {
            top: self.top,
            edges_at_least: vec![BTreeSet::new(); levels],
            nodes_at_least: vec![BTreeSet::new(); levels],
            nodes: self.level_nodes.clone(),
            frozen: vec![BTreeSet::new(); levels],
            dead_at_least: vec![BTreeSet::new(); levels],
            node_level: self.node_level.clone(),
            node_order: self.node_order.clone(),
        };
        for (&e, s) in &self.status {
            for i in 0..=s.level {
                snap.edges_at_least[i].insert(e);
                if s.dead {
                    snap.dead_at_least[i].insert(e);
                }
            }
            if s.frozen {
                snap.frozen[s.level].insert(e);
            }
        }
        for (v, &l) in self.node_level.iter().enumerate() {
            for i in 0..=l {
                snap.nodes_at_least[i].insert(v);
            }
        }
        snap
    }

    /// Structural self-check; returns the first violation found.
    pub fn check_structure(&self) -> Result<(), String> {
        for (i, vs) in self.level_nodes.iter().enumerate() {
            for (pos, &v) in vs.iter().enumerate() {
                if self.node_level[v] != i || self.node_order[v] != pos {
                    return Err(format!("node {v} listed at level {i} position {pos}"));
                }
            }
        }
        if self.level_nodes.iter().map(Vec::len).sum::<usize>() != self.node_count() {
            return Err("level node lists do not partition V".into());
        }
        for (i, es) in self.level_edges.iter().enumerate() {
            for e in es {
                let s = self.status[e];
                if s.level != i {
                    return Err(format!("edge {e} listed at level {i} but has level {}", s.level));
                }
                if s.dead != self.level_dead[i].contains(e) {
                    return Err(format!("dead list out of sync at {e}"));
                }
                let (lu, lv) = (self.node_level[e.u()], self.node_level[e.v()]);
                if s.frozen {
                    if i != lu.min(lv) {
                        return Err(format!("frozen edge {e} at level {i}, endpoint levels {lu}, {lv}"));
                    }
                } else if i == self.top || lu.min(lv) <= i {
                    return Err(format!("dropped edge {e} at level {i}, endpoint levels {lu}, {lv}"));
                }
            }
        }
        if self.level_edges.iter().map(IndexSet::len).sum::<usize>() != self.status.len() {
            return Err("edge lists do not match the status map".into());
        }
        Ok(())
    }

    /// Every node of `V^(>=i+1)` has more than `tau` edges in
    /// `E^(>=i) \ F^(i)`.
    pub fn check_peel_threshold(&self) -> Result<(), String> {
        let n = self.node_count();
        for i in 0..self.top {
            let mut deg = vec![0usize; n];
            for e in self.level_edges[i..].iter().flatten() {
                let s = self.status[e];
                if !(s.frozen && s.level == i) {
                    deg[e.u()] += 1;
                    deg[e.v()] += 1;
                }
            }
            for v in 0..n {
                if self.node_level[v] > i && deg[v] <= self.tau {
                    return Err(format!("node {v} survived round {i} with residual degree {}", deg[v]));
                }
            }
        }
        Ok(())
    }
}
