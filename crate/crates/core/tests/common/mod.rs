//! Brute-force references and graph generators shared by integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use dynsparsify::uniform::HierarchySnapshot;
use dynsparsify::{DynGraph, Edge};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `G(n, p)` with edges in ascending order.
pub fn gnp(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<Edge> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                out.push(Edge::new(a, b));
            }
        }
    }
    out
}

/// Random bipartite graph between `0..left` and `left..n`.
pub fn bipartite(rng: &mut ChaCha8Rng, left: usize, n: usize, p: f64) -> Vec<Edge> {
    let mut out = Vec::new();
    for a in 0..left {
        for b in left..n {
            if rng.gen_bool(p) {
                out.push(Edge::new(a, b));
            }
        }
    }
    out
}

/// Up to `m` random edges with every degree at most `cap`.
pub fn capped_graph(rng: &mut ChaCha8Rng, n: usize, m: usize, cap: usize) -> DynGraph {
    let mut pairs: Vec<Edge> = (0..n).flat_map(|a| (a + 1..n).map(move |b| Edge::new(a, b))).collect();
    pairs.shuffle(rng);
    let mut g = DynGraph::new(n);
    for e in pairs {
        if g.edge_count() == m {
            break;
        }
        if g.degree(e.u()) < cap && g.degree(e.v()) < cap {
            g.insert(e).unwrap();
        }
    }
    g
}

/// Maximum matching size by exhaustive search over edge subsets.
pub fn brute_max_matching(n: usize, edges: &[Edge]) -> usize {
    fn go(k: usize, edges: &[Edge], used: &mut Vec<bool>) -> usize {
        if k == edges.len() {
            return 0;
        }
        let skip = go(k + 1, edges, used);
        let e = edges[k];
        if used[e.u()] || used[e.v()] {
            return skip;
        }
        used[e.u()] = true;
        used[e.v()] = true;
        let take = 1 + go(k + 1, edges, used);
        used[e.u()] = false;
        used[e.v()] = false;
        skip.max(take)
    }
    go(0, edges, &mut vec![false; n])
}

/// Maximum half-integral fractional matching, exhaustively over edge values
/// in `{0, 1/2, 1}` with memoized remaining capacities (in half units).
pub fn brute_half_integral(n: usize, edges: &[Edge]) -> f64 {
    fn go(k: usize, edges: &[Edge], cap: &mut Vec<u8>, memo: &mut HashMap<(usize, Vec<u8>), u32>) -> u32 {
        if k == edges.len() {
            return 0;
        }
        if let Some(&v) = memo.get(&(k, cap.clone())) {
            return v;
        }
        let e = edges[k];
        let room = cap[e.u()].min(cap[e.v()]);
        let mut best = 0;
        for x in 0..=room {
            cap[e.u()] -= x;
            cap[e.v()] -= x;
            best = best.max(x as u32 + go(k + 1, edges, cap, memo));
            cap[e.u()] += x;
            cap[e.v()] += x;
        }
        memo.insert((k, cap.clone()), best);
        best
    }
    go(0, edges, &mut vec![2; n], &mut HashMap::new()) as f64 / 2.0
}

/// `gamma^(i)(v)` for every round `i` in `0..=L` from a hierarchy snapshot:
/// frozen edges of lower levels keep `2^l lambda`, edges of `E^(>=i)` carry
/// `2^i lambda`.
pub fn round_weights(s: &HierarchySnapshot, n: usize, lambda: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(s.top + 1);
    let mut below = vec![0.0f64; n];
    for i in 0..=s.top {
        let x = lambda * 2f64.powi(i as i32);
        let mut g = below.clone();
        for e in &s.edges_at_least[i] {
            g[e.u()] += x;
            g[e.v()] += x;
        }
        out.push(g);
        for e in &s.frozen[i] {
            below[e.u()] += x;
            below[e.v()] += x;
        }
    }
    out
}

pub fn degrees(n: usize, edges: impl IntoIterator<Item = Edge>) -> Vec<usize> {
    let mut d = vec![0; n];
    for e in edges {
        d[e.u()] += 1;
        d[e.v()] += 1;
    }
    d
}

pub fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}
