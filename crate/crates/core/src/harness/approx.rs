//! Best-effort generators of approximately maximal fractional matchings.
//!
//! No strategy here is guaranteed to succeed on every graph, so each result
//! is returned only if [`is_approximately_maximal`] accepts it.

use serde::{Deserialize, Serialize};

use crate::graph::{DynGraph, Edge};
use crate::oracles::matching::max_fractional_matching_weights;
use crate::oracles::maximal::is_approximately_maximal;
use crate::weights::Weights;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Raise all unfrozen edges at the same rate; an edge stops at the cap
    /// `beta` or when an endpoint fills up.
    WaterFill,
    /// Maximum fractional matching from the oracle, capped at `beta` per edge.
    OracleFractional,
    /// Edges in ascending order, each taking `min(beta, residual slack)`.
    Greedy,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "water-fill" => Ok(Strategy::WaterFill),
            "oracle-fractional" => Ok(Strategy::OracleFractional),
            "greedy" => Ok(Strategy::Greedy),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

const FULL_TOL: f64 = 1e-12;

fn water_fill(g: &DynGraph, cap: f64) -> Weights<f64> {
    let n = g.node_count();
    let edges = g.sorted_edges();
    let mut x = vec![0.0f64; edges.len()];
    let mut active = vec![true; edges.len()];
    // load from frozen edges, and number of active incident edges
    let mut fixed = vec![0.0f64; n];
    let mut rate = vec![0usize; n];
    for e in &edges {
        for v in e.endpoints() {
            rate[v] += 1;
        }
    }
    let mut level = 0.0f64;
    loop {
        let mut next = cap;
        for v in 0..n {
            if rate[v] > 0 {
                next = next.min((1.0 - fixed[v]) / rate[v] as f64);
            }
        }
        if rate.iter().all(|&r| r == 0) {
            break;
        }
        level = next.max(level);
        let full: Vec<bool> =
            (0..n).map(|v| rate[v] > 0 && fixed[v] + rate[v] as f64 * level >= 1.0 - FULL_TOL).collect();
        let at_cap = level >= cap;
        for (k, e) in edges.iter().enumerate() {
            if active[k] && (at_cap || full[e.u()] || full[e.v()]) {
                active[k] = false;
                x[k] = level;
                for v in e.endpoints() {
                    fixed[v] += level;
                    rate[v] -= 1;
                }
            }
        }
    }
    Weights::from_pairs(n, edges.into_iter().zip(x).filter(|&(_, w)| w > 0.0))
}

fn greedy(g: &DynGraph, cap: f64) -> Weights<f64> {
    let n = g.node_count();
    let mut load = vec![0.0f64; n];
    let mut out = Vec::new();
    for e in g.sorted_edges() {
        let x = cap.min(1.0 - load[e.u()]).min(1.0 - load[e.v()]);
        if x > 0.0 {
            load[e.u()] += x;
            load[e.v()] += x;
            out.push((e, x));
        }
    }
    Weights::from_pairs(n, out)
}

fn oracle_capped(g: &DynGraph, cap: f64) -> Weights<f64> {
    let edges: Vec<Edge> = g.sorted_edges();
    let w = max_fractional_matching_weights(g.node_count(), &edges);
    Weights::from_pairs(g.node_count(), w.iter().map(|(e, x)| (e, x.min(cap))))
}

/// A fractional matching on `g` that is `(alpha, beta)`-approximately
/// maximal, or `None` if the strategy's attempt fails the check.
pub fn gen_approx_maximal(g: &DynGraph, alpha: f64, beta: f64, strategy: Strategy) -> Option<Weights<f64>> {
    let w = match strategy {
        Strategy::WaterFill => water_fill(g, beta),
        Strategy::OracleFractional => oracle_capped(g, beta),
        Strategy::Greedy => greedy(g, beta),
    };
    (w.is_fractional_matching() && is_approximately_maximal(&w, g, alpha, beta)).then_some(w)
}
