//! Sparsifier for a dynamic `lambda`-uniform fractional matching.
//!
//! Edges are split into an active set, which lives in the [`Hierarchy`], and a
//! passive set of recent insertions that the hierarchy ignores. Deleted
//! active edges stay in the hierarchy as dead edges. Two slack conditions
//! decide when to rebuild:
//!
//! * `|E_(p)| <= eps |E_(a)|`, restored by a full rebuild;
//! * `|D^(>=i)| <= eps |E^(>=i)|` for every level, restored by cleaning and
//!   rebuilding from the lowest violated level.
//!
//! The output is `F_(a)`, the frozen edges that are still active.

mod hierarchy;
mod metrics;
mod params;

use std::collections::BTreeMap;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

pub use hierarchy::{peel, EdgeStatus, Hierarchy, HierarchySnapshot, Peel};
pub use metrics::{Metrics, RebuildRecord, UpdateOutcome};
pub use params::{compute_levels, delta_constants, Mode, Params};

use crate::error::{GraphError, ParamError, SparsifyError};
use crate::graph::{DynGraph, Edge, NodeId};
use crate::num::Scalar;
use crate::oracles::analogous::AnalogousStaticInput;
use crate::oracles::distance::scale_down;
use crate::weights::Weights;

/// Orientation of an edge set: each edge mapped to its tail.
pub type Orientation = BTreeMap<Edge, NodeId>;

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, outcome: Result<(), String>) -> Self {
        let (passed, detail) = match outcome {
            Ok(()) => (true, None),
            Err(msg) => (false, Some(msg)),
        };
        CheckResult { name: name.into(), passed, detail }
    }
}

/// Per-check results of [`UniformSparsifier::check_invariants`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub checks: Vec<CheckResult>,
}

impl InvariantReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Sorted-merge difference: `(new \ old, old \ new)`.
fn set_diff(mut old: Vec<Edge>, mut new: Vec<Edge>) -> (Vec<Edge>, Vec<Edge>) {
    old.sort_unstable();
    new.sort_unstable();
    let (mut added, mut removed) = (Vec::new(), Vec::new());
    let (mut i, mut j) = (0, 0);
    while i < old.len() || j < new.len() {
        if j == new.len() || (i < old.len() && old[i] < new[j]) {
            removed.push(old[i]);
            i += 1;
        } else if i == old.len() || new[j] < old[i] {
            added.push(new[j]);
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    (added, removed)
}

#[derive(Clone, Debug)]
pub struct UniformSparsifier {
    params: Params,
    active: IndexSet<Edge>,
    passive: IndexSet<Edge>,
    hierarchy: Hierarchy,
    metrics: Metrics,
}

impl UniformSparsifier {
    /// Sparsifier of the edgeless graph on `params.n` nodes.
    pub fn new(params: Params) -> Result<Self, ParamError> {
        params.with_lambda(params.lambda)?;
        let hierarchy = Hierarchy::new(params.n, params.levels(), params.peel_threshold());
        Ok(UniformSparsifier {
            params,
            active: IndexSet::new(),
            passive: IndexSet::new(),
            hierarchy,
            metrics: Metrics::default(),
        })
    }

    /// Build over every edge of `g`, all active. The `lambda`-uniform weight
    /// on `g` must be a fractional matching.
    pub fn static_build(g: &DynGraph, params: Params) -> Result<Self, SparsifyError> {
        if g.node_count() != params.n {
            return Err(GraphError::NodeOutOfRange { node: g.node_count(), n: params.n }.into());
        }
        for v in 0..g.node_count() {
            if g.degree(v) as f64 * params.lambda > 1.0 + 1e-9 {
                return Err(SparsifyError::NotFractional { node: v, degree: g.degree(v) });
            }
        }
        let mut s = UniformSparsifier::new(params)?;
        s.active = g.sorted_edges().into_iter().collect();
        s.metrics.build_work = s.hierarchy.rebuild(0, g.sorted_edges());
        Ok(s)
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn hierarchy(&self) -> &Hierarchy {
        &self.hierarchy
    }

    pub fn metrics(&self) -> &Metrics {
        &self.metrics
    }

    /// `L`.
    pub fn levels(&self) -> usize {
        self.hierarchy.top()
    }

    pub fn active_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.active.iter().copied()
    }

    pub fn passive_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.passive.iter().copied()
    }

    pub fn active_count(&self) -> usize {
        self.active.len()
    }

    pub fn passive_count(&self) -> usize {
        self.passive.len()
    }

    /// `E = E_(a) + E_(p)`.
    pub fn edge_count(&self) -> usize {
        self.active.len() + self.passive.len()
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.active.contains(&e) || self.passive.contains(&e)
    }

    /// `|E_(p)| + sum_i |D^(>=i)|`, recomputed from the sets.
    pub fn potential_recomputed(&self) -> usize {
        self.passive.len() + self.hierarchy.dead_weight()
    }

    fn check_edge(&self, e: Edge) -> Result<(), GraphError> {
        Edge::checked(e.u(), e.v(), self.params.n).map(|_| ())
    }

    /// Lowest `i` with `|D^(>=i)| > eps |E^(>=i)|`.
    fn first_violated_level(&self) -> Option<usize> {
        let top = self.levels();
        let (mut dead, mut all) = (0usize, 0usize);
        let mut found = None;
        for i in (0..=top).rev() {
            dead += self.hierarchy.level_dead_count(i);
            all += self.hierarchy.level_edge_count(i);
            if dead as f64 > self.params.eps * all as f64 {
                found = Some(i);
            }
        }
        found
    }

    fn passive_slack_broken(&self) -> bool {
        self.passive.len() as f64 > self.params.eps * self.active.len() as f64
    }

    /// Clear every dead edge, merge the passive edges into the active set and
    /// rebuild from level 0.
    fn reset(&mut self) -> RebuildRecord {
        let cleared_dead = self.hierarchy.clean_up(0);
        let cleared_passive = self.passive.len();
        self.active.extend(self.passive.drain(..));
        let mut edges: Vec<Edge> = self.active.iter().copied().collect();
        edges.sort_unstable();
        let work = self.hierarchy.rebuild(0, edges) + cleared_dead as u64;
        RebuildRecord { from_level: 0, cleared_dead, cleared_passive, work }
    }

    pub fn handle_insertion(&mut self, e: Edge) -> Result<UpdateOutcome, GraphError> {
        self.check_edge(e)?;
        if self.contains(e) {
            return Err(GraphError::DuplicateEdge(e));
        }
        let phi_before = self.metrics.potential;
        self.passive.insert(e);
        let mut out = UpdateOutcome { phi_before, work: 1, ..Default::default() };
        if self.passive_slack_broken() {
            let old = self.hierarchy.live_frozen_from(0);
            let rec = self.reset();
            (out.added, out.removed) = set_diff(old, self.hierarchy.live_frozen_from(0));
            out.work += rec.work;
            out.rebuild = Some(rec);
            out.phi_after = phi_before + 1 - rec.cleared_dead - rec.cleared_passive;
        } else {
            out.phi_after = phi_before + 1;
        }
        self.metrics.record(&out);
        Ok(out)
    }

    pub fn handle_deletion(&mut self, e: Edge) -> Result<UpdateOutcome, GraphError> {
        self.check_edge(e)?;
        let phi_before = self.metrics.potential;
        let mut out = UpdateOutcome { phi_before, work: 1, ..Default::default() };
        if self.passive.swap_remove(&e) {
            out.phi_after = phi_before - 1;
            self.metrics.record(&out);
            return Ok(out);
        }
        if !self.active.swap_remove(&e) {
            return Err(GraphError::MissingEdge(e));
        }
        let status = self.hierarchy.status(e).expect("active edge lives in the hierarchy");
        let level = self.hierarchy.mark_dead(e).expect("active edge is not dead");
        if status.frozen {
            out.removed.push(e);
        }
        let mut phi = phi_before + level + 1;
        out.work += (level + 1 + self.levels() + 1) as u64;
        let old = self.hierarchy.live_frozen_from(0);
        let mut rec: Option<RebuildRecord> = None;
        if let Some(j) = self.first_violated_level() {
            let cleared_dead = self.hierarchy.clean_up(j);
            let edges = self.hierarchy.sorted_edges_from(j);
            let work = self.hierarchy.rebuild(j, edges) + cleared_dead as u64;
            rec = Some(RebuildRecord { from_level: j, cleared_dead, cleared_passive: 0, work });
        }
        // losing an active edge can also break the passive slack
        if self.passive_slack_broken() {
            let full = self.reset();
            rec = Some(match rec {
                None => full,
                Some(r) => RebuildRecord {
                    from_level: 0,
                    cleared_dead: r.cleared_dead + full.cleared_dead,
                    cleared_passive: full.cleared_passive,
                    work: r.work + full.work,
                },
            });
        }
        if let Some(r) = rec {
            let (added, removed) = set_diff(old, self.hierarchy.live_frozen_from(0));
            out.added = added;
            out.removed.extend(removed);
            out.work += r.work;
            phi -= r.cleared_dead + r.cleared_passive;
            out.rebuild = Some(r);
        }
        out.phi_after = phi;
        self.metrics.record(&out);
        Ok(out)
    }

    /// Drop the dead edges of levels `>= j`. Returns the number of cleared
    /// dead-set memberships, which is also the drop in potential.
    pub fn clean_up(&mut self, j: usize) -> Result<usize, ParamError> {
        if j > self.levels() {
            return Err(ParamError::LevelOutOfRange { level: j, levels: self.levels() });
        }
        let cleared = self.hierarchy.clean_up(j);
        self.metrics.potential -= cleared;
        Ok(cleared)
    }

    /// Recompute levels `from..=L` from the current `E^(>=from)`, which must
    /// hold no dead edges (run [`clean_up`](Self::clean_up) first). Returns the
    /// work spent.
    pub fn rebuild(&mut self, from: usize) -> Result<u64, SparsifyError> {
        if from > self.levels() {
            return Err(ParamError::LevelOutOfRange { level: from, levels: self.levels() }.into());
        }
        if self.hierarchy.dead_at_least(from) > 0 {
            return Err(SparsifyError::DeadEdgesPresent { level: from });
        }
        let edges = self.hierarchy.sorted_edges_from(from);
        Ok(self.hierarchy.rebuild(from, edges))
    }

    /// `F_(a) = F ∩ E_(a)`, sorted.
    pub fn sparsifier_edges(&self) -> Vec<Edge> {
        let mut out = self.hierarchy.live_frozen_from(0);
        out.sort_unstable();
        out
    }

    /// Level `l(e)` of an edge in `F_(a)`.
    pub fn frozen_level(&self, e: Edge) -> Option<usize> {
        self.hierarchy.status(e).filter(|s| s.frozen && !s.dead).map(|s| s.level)
    }

    /// `2^l(e) lambda` on `F_(a)`.
    pub fn gamma_active<S: Scalar>(&self) -> Weights<S> {
        let lambda = S::from_f64_lossy(self.params.lambda);
        let two = S::one() + S::one();
        let mut pow = vec![lambda];
        for _ in 0..self.levels() {
            let last = *pow.last().unwrap();
            pow.push(last * two);
        }
        let pairs = self
            .hierarchy
            .edges()
            .filter(|(_, s)| s.frozen && !s.dead)
            .map(|(e, s)| (e, pow[s.level]));
        Weights::from_pairs(self.params.n, pairs)
    }

    /// `w_(a)`: `lambda` on every active edge.
    pub fn active_uniform<S: Scalar>(&self) -> Weights<S> {
        Weights::uniform(self.params.n, self.active.iter().copied(), S::from_f64_lossy(self.params.lambda))
    }

    /// `w`: `lambda` on every edge, active or passive.
    pub fn full_uniform<S: Scalar>(&self) -> Weights<S> {
        let edges = self.active.iter().chain(self.passive.iter()).copied();
        Weights::uniform(self.params.n, edges, S::from_f64_lossy(self.params.lambda))
    }

    /// `h' = scale_down(gamma_(a), w_(a))`, a fractional matching on `F_(a)`
    /// bounded nodewise by `w`.
    pub fn certified_matching<S: Scalar>(&self) -> Weights<S> {
        scale_down(&self.gamma_active::<S>(), &self.active_uniform::<S>())
    }

    /// Tail of every edge of `F`: lower level points to higher level, ties
    /// below `L` go from earlier to later peel order, ties at `L` from the
    /// smaller to the larger id.
    pub fn orientation(&self) -> Orientation {
        let h = &self.hierarchy;
        let top = self.levels();
        h.edges()
            .filter(|(_, s)| s.frozen)
            .map(|(e, _)| {
                let (u, v) = (e.u(), e.v());
                let key = |x: NodeId| {
                    let l = h.node_level(x);
                    (l, if l == top { x } else { h.node_order(x) })
                };
                (e, if key(u) < key(v) { u } else { v })
            })
            .collect()
    }

    /// Node levels `l(v)`.
    pub fn node_levels(&self) -> Vec<usize> {
        (0..self.params.n).map(|v| self.hierarchy.node_level(v)).collect()
    }

    pub fn snapshot(&self) -> HierarchySnapshot {
        self.hierarchy.snapshot()
    }

    /// Input of the static recomputation that the live hierarchy must equal.
    pub fn analogous_input(&self) -> AnalogousStaticInput {
        let top = self.levels();
        let mut dead = vec![Vec::new(); top + 1];
        for (e, s) in self.hierarchy.edges().filter(|(_, s)| s.dead) {
            for d in dead.iter_mut().take(s.level + 1) {
                d.push(e);
            }
        }
        for d in &mut dead {
            d.sort_unstable();
        }
        let mut active: Vec<Edge> = self.active.iter().copied().collect();
        active.sort_unstable();
        AnalogousStaticInput {
            n: self.params.n,
            active,
            dead,
            top,
            tau: self.params.peel_threshold(),
        }
    }

    /// Both slack invariants, the hierarchy laws, and potential consistency.
    pub fn check_invariants(&self) -> InvariantReport {
        let eps = self.params.eps;
        let mut checks = Vec::new();

        let (p, a) = (self.passive.len(), self.active.len());
        checks.push(CheckResult::new(
            "passive_slack",
            if p as f64 <= eps * a as f64 { Ok(()) } else { Err(format!("|E_p| = {p} > eps * {a}")) },
        ));

        let dead_slack = (0..=self.levels()).try_for_each(|i| {
            let (d, e) = (self.hierarchy.dead_at_least(i), self.hierarchy.edges_at_least(i));
            if d as f64 <= eps * e as f64 {
                Ok(())
            } else {
                Err(format!("level {i}: |D| = {d} > eps * {e}"))
            }
        });
        checks.push(CheckResult::new("dead_slack", dead_slack));

        let partition = if let Some(e) = self.passive.iter().find(|e| self.active.contains(*e)) {
            Err(format!("edge {e} both active and passive"))
        } else if let Some(e) = self.active.iter().find(|e| self.hierarchy.status(**e).is_none_or(|s| s.dead)) {
            Err(format!("active edge {e} missing from the hierarchy"))
        } else if self.hierarchy.edges().filter(|(_, s)| !s.dead).count() != a {
            Err("hierarchy holds a live edge that is not active".into())
        } else {
            Ok(())
        };
        checks.push(CheckResult::new("edge_partition", partition));
        checks.push(CheckResult::new("hierarchy_structure", self.hierarchy.check_structure()));
        checks.push(CheckResult::new("peel_threshold", self.hierarchy.check_peel_threshold()));

        let beta = self.params.beta;
        let weight_law = self.gamma_active::<f64>().iter().try_for_each(|(e, x)| {
            let l = self.frozen_level(e).unwrap();
            if x == self.params.level_weight(l) && x < beta {
                Ok(())
            } else {
                Err(format!("edge {e}: weight {x} at level {l}"))
            }
        });
        checks.push(CheckResult::new("weight_law", weight_law));

        let phi = self.potential_recomputed();
        checks.push(CheckResult::new(
            "potential",
            if phi == self.metrics.potential {
                Ok(())
            } else {
                Err(format!("tracked {} vs recomputed {phi}", self.metrics.potential))
            },
        ));
        InvariantReport { checks }
    }

    #[cfg(test)]
    pub(crate) fn passive_mut(&mut self) -> &mut IndexSet<Edge> {
        &mut self.passive
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(a: NodeId, b: NodeId) -> Edge {
        Edge::new(a, b)
    }

    fn params(n: usize) -> Params {
        Params::experiment(n, 0.2, 0.2, 0.025).unwrap()
    }

    fn dense(n: usize) -> DynGraph {
        let mut g = DynGraph::new(n);
        for a in 0..n {
            for b in a + 1..n {
                if (a * 7 + b * 3) % 5 != 0 {
                    g.insert(e(a, b)).unwrap();
                }
            }
        }
        g
    }

    #[test]
    fn set_diff_merges() {
        let (add, rem) = set_diff(vec![e(0, 1), e(0, 2), e(1, 2)], vec![e(1, 2), e(0, 3)]);
        assert_eq!(add, vec![e(0, 3)]);
        assert_eq!(rem, vec![e(0, 1), e(0, 2)]);
    }

    #[test]
    fn low_degree_graph_is_its_own_sparsifier() {
        let g = DynGraph::from_edges(6, [e(0, 1), e(1, 2), e(2, 3), e(3, 4), e(4, 5)]).unwrap();
        let s = UniformSparsifier::static_build(&g, params(6)).unwrap();
        assert_eq!(s.sparsifier_edges(), g.sorted_edges());
        assert!(s.hierarchy().level_nodes(0).len() == 6);
        // gamma_(a) = w_(a), so h' = w
        let h: Weights<f64> = s.certified_matching();
        assert_eq!(h, s.full_uniform());
        assert!(s.check_invariants().all_passed());
    }

    #[test]
    fn empty_graph() {
        let s = UniformSparsifier::static_build(&DynGraph::new(5), params(5)).unwrap();
        assert!(s.sparsifier_edges().is_empty());
        assert!(s.check_invariants().all_passed());
    }

    #[test]
    fn overloaded_lambda_rejected() {
        let p = Params::experiment(30, 0.2, 0.2, 0.1).unwrap();
        let r = UniformSparsifier::static_build(&dense(30), p);
        assert!(matches!(r, Err(SparsifyError::NotFractional { .. })));
    }

    #[test]
    fn corrupted_passive_set_fails_slack() {
        let mut s = UniformSparsifier::static_build(&dense(30), params(30)).unwrap();
        for a in 0..30 {
            for b in a + 1..30 {
                if !s.contains(e(a, b)) {
                    s.passive_mut().insert(e(a, b));
                }
            }
        }
        let report = s.check_invariants();
        assert!(!report.get("passive_slack").unwrap().passed);
    }

    #[test]
    fn lazy_insertion_has_no_recourse() {
        let g = dense(30);
        let mut s = UniformSparsifier::static_build(&g, params(30)).unwrap();
        let missing = (1..30).map(|b| e(0, b)).find(|x| !g.contains(*x)).unwrap();
        let before = s.snapshot();
        let out = s.handle_insertion(missing).unwrap();
        assert!(out.rebuild.is_none());
        assert_eq!(out.recourse(), 0);
        assert_eq!(out.phi_after, out.phi_before + 1);
        assert_eq!(s.snapshot(), before);
        assert_eq!(s.handle_insertion(missing), Err(GraphError::DuplicateEdge(missing)));
    }

    #[test]
    fn deleting_frozen_edge_leaves_output_immediately() {
        let g = dense(30);
        let mut s = UniformSparsifier::static_build(&g, params(30)).unwrap();
        let x = s.sparsifier_edges()[0];
        let out = s.handle_deletion(x).unwrap();
        assert!(!s.sparsifier_edges().contains(&x));
        if out.rebuild.is_none() {
            assert_eq!(out.removed, vec![x]);
            assert!(out.added.is_empty());
        }
        assert!(s.check_invariants().all_passed());
        assert_eq!(s.handle_deletion(x), Err(GraphError::MissingEdge(x)));
    }

    #[test]
    fn orientation_respects_levels() {
        let s = UniformSparsifier::static_build(&dense(40), params(40)).unwrap();
        let levels = s.node_levels();
        for (x, tail) in s.orientation() {
            let head = x.other(tail);
            assert!(levels[tail] <= levels[head]);
        }
    }

    #[test]
    fn rebuild_level_range() {
        let mut s = UniformSparsifier::static_build(&dense(20), params(20)).unwrap();
        assert!(s.rebuild(3).is_err());
        let before = s.snapshot();
        s.rebuild(2).unwrap();
        assert_eq!(s.snapshot(), before);
        s.rebuild(0).unwrap();
        assert_eq!(s.snapshot(), before);
    }
}
