//! Degree halving by maximal-walk decomposition.
//!
//! The edge set is partitioned into maximal walks, and every other edge of
//! each walk is kept. Interior visits of a walk contribute exactly half their
//! degree; each node is a tip of at most one walk, so every degree ends up
//! within one of half its original value.

use std::collections::HashMap;

use crate::graph::{Edge, NodeId};

/// A sequence of distinct edges `(u_0, v_0), ..., (u_k, v_k)` with `v_i = u_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    steps: Vec<(NodeId, NodeId)>,
}

impl Walk {
    /// Build a walk from directed steps. Panics if consecutive steps do not
    /// share their stitching node.
    pub fn from_steps(steps: Vec<(NodeId, NodeId)>) -> Self {
        assert!(steps.windows(2).all(|w| w[0].1 == w[1].0), "steps do not form a walk");
        Walk { steps }
    }

    pub fn steps(&self) -> &[(NodeId, NodeId)] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.steps.iter().map(|&(a, b)| Edge::new(a, b))
    }

    /// `u_0` and `v_k`.
    pub fn tips(&self) -> Option<(NodeId, NodeId)> {
        Some((self.steps.first()?.0, self.steps.last()?.1))
    }

    pub fn is_closed(&self) -> bool {
        self.tips().is_some_and(|(a, b)| a == b)
    }

    /// Edges at positions 0, 2, 4, ...
    pub fn even_edges(&self) -> Vec<Edge> {
        self.steps.iter().step_by(2).map(|&(a, b)| Edge::new(a, b)).collect()
    }
}

/// Edge-disjoint maximal walks covering an edge set, in extraction order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WalkDecomposition {
    pub walks: Vec<Walk>,
}

impl WalkDecomposition {
    pub fn edge_count(&self) -> usize {
        self.walks.iter().map(Walk::len).sum()
    }

    /// Union of the even-indexed edges of every walk.
    pub fn even_edges(&self) -> Vec<Edge> {
        self.walks.iter().flat_map(|w| w.steps.iter().step_by(2)).map(|&(a, b)| Edge::new(a, b)).collect()
    }
}

/// Compact adjacency over the endpoints of an edge list, with per-node
/// cursors that skip consumed edges.
struct WalkGraph {
    /// local index -> node id, ascending
    nodes: Vec<NodeId>,
    offsets: Vec<usize>,
    /// (neighbor local index, edge index)
    slots: Vec<(u32, u32)>,
    cursor: Vec<usize>,
    used: Vec<bool>,
}

impl WalkGraph {
    fn new(edges: &[Edge]) -> Self {
        let max_id = edges.iter().map(|e| e.v()).max().unwrap_or(0);
        // dense ids index a table directly; sparse ones go through a map
        let (nodes, ends): (Vec<NodeId>, Vec<(u32, u32)>) = if max_id <= 4 * edges.len() + 64 {
            let mut local = vec![u32::MAX; max_id + 1];
            for e in edges {
                local[e.u()] = 0;
                local[e.v()] = 0;
            }
            let mut nodes = Vec::new();
            for (x, slot) in local.iter_mut().enumerate() {
                if *slot == 0 {
                    *slot = nodes.len() as u32;
                    nodes.push(x);
                }
            }
            (nodes, edges.iter().map(|e| (local[e.u()], local[e.v()])).collect())
        } else {
            let mut nodes: Vec<NodeId> = edges.iter().flat_map(|e| e.endpoints()).collect();
            nodes.sort_unstable();
            nodes.dedup();
            let local: HashMap<NodeId, u32> = nodes.iter().enumerate().map(|(i, &x)| (x, i as u32)).collect();
            (nodes, edges.iter().map(|e| (local[&e.u()], local[&e.v()])).collect())
        };

        let k = nodes.len();
        let mut offsets = vec![0usize; k + 1];
        for &(a, b) in &ends {
            offsets[a as usize + 1] += 1;
            offsets[b as usize + 1] += 1;
        }
        for i in 0..k {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut slots = vec![(0u32, 0u32); 2 * edges.len()];
        for (idx, &(a, b)) in ends.iter().enumerate() {
            slots[fill[a as usize]] = (b, idx as u32);
            fill[a as usize] += 1;
            slots[fill[b as usize]] = (a, idx as u32);
            fill[b as usize] += 1;
        }
        let cursor = offsets[..k].to_vec();
        WalkGraph { nodes, offsets, slots, cursor, used: vec![false; edges.len()] }
    }

    /// Consume and return the next unused edge at `x`, as (neighbor, edge index).
    fn take(&mut self, x: usize) -> Option<(usize, usize)> {
        let end = self.offsets[x + 1];
        while self.cursor[x] < end {
            let (nb, idx) = self.slots[self.cursor[x]];
            self.cursor[x] += 1;
            if !self.used[idx as usize] {
                self.used[idx as usize] = true;
                return Some((nb as usize, idx as usize));
            }
        }
        None
    }

    fn has_residual(&mut self, x: usize) -> bool {
        let end = self.offsets[x + 1];
        while self.cursor[x] < end && self.used[self.slots[self.cursor[x]].1 as usize] {
            self.cursor[x] += 1;
        }
        self.cursor[x] < end
    }
}

/// Partition `edges` (distinct, no self-loops) into maximal walks.
///
/// Each walk starts at the lowest-numbered node that still has an unused
/// edge, extends forward until stuck, then extends backward from its start
/// until stuck. Both tips therefore have no unused edge left when the walk is
/// emitted. Deterministic for a given input order; runs in `O(|edges|)` plus
/// sorting the distinct endpoints.
pub fn decompose_walks(edges: &[Edge]) -> WalkDecomposition {
    let mut g = WalkGraph::new(edges);
    let mut walks = Vec::new();
    let mut start = 0usize;
    while start < g.nodes.len() {
        if !g.has_residual(start) {
            start += 1;
            continue;
        }
        let mut forward = Vec::new();
        let mut cur = start;
        while let Some((nb, _)) = g.take(cur) {
            forward.push((cur, nb));
            cur = nb;
        }
        let mut backward = Vec::new();
        cur = start;
        while let Some((nb, _)) = g.take(cur) {
            backward.push((nb, cur));
            cur = nb;
        }
        backward.reverse();
        backward.extend(forward);
        let steps = backward.into_iter().map(|(a, b)| (g.nodes[a], g.nodes[b])).collect();
        walks.push(Walk { steps });
    }
    WalkDecomposition { walks }
}

/// `W^(even)` of a single walk.
pub fn even_edges(walk: &Walk) -> Vec<Edge> {
    walk.even_edges()
}

/// Subset of `edges` in which every node keeps between `deg/2 - 1` and
/// `deg/2 + 1` of its incident edges.
pub fn degree_split(edges: &[Edge]) -> Vec<Edge> {
    decompose_walks(edges).even_edges()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeMap, BTreeSet, HashSet};

    fn e(a: NodeId, b: NodeId) -> Edge {
        Edge::new(a, b)
    }

    fn degrees(edges: &[Edge]) -> BTreeMap<NodeId, usize> {
        let mut d = BTreeMap::new();
        for x in edges.iter().flat_map(|e| e.endpoints()) {
            *d.entry(x).or_default() += 1;
        }
        d
    }

    fn assert_window(input: &[Edge], output: &[Edge]) {
        let din = degrees(input);
        let dout = degrees(output);
        for (&v, &d) in &din {
            let got = *dout.get(&v).unwrap_or(&0) as f64;
            let half = d as f64 / 2.0;
            assert!(got >= half - 1.0 && got <= half + 1.0, "node {v}: {got} vs {d}");
        }
    }

    // Exhaustive enumeration of every partition of `edges` into walks that are
    // maximal in the residual graph at the moment they are taken. Returns the
    // set of resulting even-edge sets. Only for tiny inputs.
    fn all_even_sets(edges: &[Edge]) -> BTreeSet<BTreeSet<Edge>> {
        fn residual_deg(rest: &BTreeSet<Edge>, x: NodeId) -> usize {
            rest.iter().filter(|e| e.touches(x)).count()
        }
        fn walks_from(
            rest: &BTreeSet<Edge>,
            path: &mut Vec<(NodeId, NodeId)>,
            out: &mut Vec<Vec<(NodeId, NodeId)>>,
        ) {
            let tip = path.last().unwrap().1;
            let used: HashSet<Edge> = path.iter().map(|&(a, b)| Edge::new(a, b)).collect();
            let next: Vec<Edge> = rest.iter().copied().filter(|e| e.touches(tip) && !used.contains(e)).collect();
            if next.is_empty() {
                let mut residual = rest.clone();
                for e in &used {
                    residual.remove(e);
                }
                let head = path[0].0;
                if residual_deg(&residual, head) == 0 {
                    out.push(path.clone());
                }
                return;
            }
            // a walk may also stop early only if it is maximal, which requires
            // the tip to have no residual edges; so always extend here
            for ed in next {
                path.push((tip, ed.other(tip)));
                walks_from(rest, path, out);
                path.pop();
            }
        }
        fn rec(rest: BTreeSet<Edge>, acc: BTreeSet<Edge>, out: &mut BTreeSet<BTreeSet<Edge>>) {
            if rest.is_empty() {
                out.insert(acc);
                return;
            }
            let mut walks = Vec::new();
            for &ed in &rest {
                for (a, b) in [(ed.u(), ed.v()), (ed.v(), ed.u())] {
                    let mut path = vec![(a, b)];
                    walks_from(&rest, &mut path, &mut walks);
                }
            }
            for w in walks {
                let mut r = rest.clone();
                let mut a = acc.clone();
                for (i, &(x, y)) in w.iter().enumerate() {
                    r.remove(&Edge::new(x, y));
                    if i % 2 == 0 {
                        a.insert(Edge::new(x, y));
                    }
                }
                rec(r, a, out);
            }
        }
        let mut out = BTreeSet::new();
        rec(edges.iter().copied().collect(), BTreeSet::new(), &mut out);
        out
    }

    #[test]
    fn path_is_a_single_walk() {
        let path = [e(0, 1), e(1, 2), e(2, 3)];
        let d = decompose_walks(&path);
        assert_eq!(d.walks.len(), 1);
        assert_eq!(d.walks[0].len(), 3);
        let kept: BTreeSet<Edge> = degree_split(&path).into_iter().collect();
        assert_eq!(kept, [e(0, 1), e(2, 3)].into_iter().collect());
    }

    #[test]
    fn empty_input() {
        assert!(decompose_walks(&[]).walks.is_empty());
        assert!(degree_split(&[]).is_empty());
    }

    #[test]
    fn cycle_is_one_closed_walk() {
        let c4 = [e(0, 1), e(1, 2), e(2, 3), e(0, 3)];
        let d = decompose_walks(&c4);
        assert_eq!(d.walks.len(), 1);
        assert_eq!(d.walks[0].len(), 4);
        assert!(d.walks[0].is_closed());
        let kept = degree_split(&c4);
        assert_eq!(kept.len(), 2);
        assert!(kept[0].u() != kept[1].u() && kept[0].v() != kept[1].v() && kept[0].u() != kept[1].v());
    }

    #[test]
    fn c4_brute_force_agrees() {
        let c4 = [e(0, 1), e(1, 2), e(2, 3), e(0, 3)];
        let all = all_even_sets(&c4);
        // every maximal decomposition of C4 is a single closed 4-walk, whose
        // even edges are one of the two perfect matchings
        let expected: BTreeSet<BTreeSet<Edge>> = [
            [e(0, 1), e(2, 3)].into_iter().collect(),
            [e(1, 2), e(0, 3)].into_iter().collect(),
        ]
        .into_iter()
        .collect();
        assert_eq!(all, expected);
        let ours: BTreeSet<Edge> = degree_split(&c4).into_iter().collect();
        assert!(all.contains(&ours));
    }

    #[test]
    fn star_brute_force_agrees() {
        let star = [e(0, 1), e(0, 2), e(0, 3)];
        let all = all_even_sets(&star);
        for s in &all {
            let v: Vec<Edge> = s.iter().copied().collect();
            assert_window(&star, &v);
        }
        let ours = degree_split(&star);
        assert_eq!(degrees(&ours)[&0], 2);
        assert!(all.contains(&ours.iter().copied().collect()));
    }

    #[test]
    fn even_edges_by_index_parity() {
        let w = Walk::from_steps(vec![(0, 1), (1, 2), (2, 3)]);
        assert_eq!(even_edges(&w), vec![e(0, 1), e(2, 3)]);
        let single = Walk::from_steps(vec![(5, 4)]);
        assert_eq!(even_edges(&single), vec![e(4, 5)]);
        let c = Walk::from_steps(vec![(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(even_edges(&c), vec![e(0, 1), e(2, 3)]);
    }

    #[test]
    fn walks_are_maximal_and_tips_unique() {
        let edges: Vec<Edge> = (0..12).flat_map(|a| (a + 1..12).filter(move |b| (a * 7 + b * 3) % 4 != 0).map(move |b| e(a, b))).collect();
        let d = decompose_walks(&edges);
        assert_eq!(d.edge_count(), edges.len());
        let mut residual: BTreeSet<Edge> = edges.iter().copied().collect();
        let mut tips_seen = HashSet::new();
        for w in &d.walks {
            for ed in w.edges() {
                assert!(residual.remove(&ed), "edge reused");
            }
            let (a, b) = w.tips().unwrap();
            assert!(!residual.iter().any(|x| x.touches(a) || x.touches(b)));
            for t in [a, b].into_iter().collect::<BTreeSet<_>>() {
                assert!(tips_seen.insert(t), "node {t} is a tip of two walks");
            }
        }
        assert!(residual.is_empty());
        assert_window(&edges, &degree_split(&edges));
    }
}
