//! Sparsifier for an arbitrary dynamic fractional matching.
//!
//! Each weight is rounded down to its geometric class. Edges of class `i`
//! form a `lambda_i`-uniform fractional matching and are handed to their own
//! [`UniformSparsifier`]; heavy edges (`w >= beta`) go straight into the
//! output, and edges below the lowest class are dropped. The output edge set
//! is `E_S = E_heavy ∪ F_0 ∪ ... ∪ F_K`.

mod discretize;

use std::collections::{BTreeMap, HashMap};

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

pub use discretize::{Discretization, LevelAssignment};

use crate::error::{GraphError, SparsifyError};
use crate::graph::{DynGraph, Edge, UpdateEvent};
use crate::num::Scalar;
use crate::oracles::maximal::is_approximately_maximal;
use crate::oracles::orientation::out_degrees;
use crate::uniform::{CheckResult, InvariantReport, Mode, Orientation, Params, UniformSparsifier};
use crate::weights::Weights;

/// Change of `E_S` caused by one update, after cancelling edges that left
/// one part of the output and entered another.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralOutcome {
    pub added: Vec<Edge>,
    pub removed: Vec<Edge>,
    pub work: u64,
}

impl GeneralOutcome {
    pub fn recourse(&self) -> usize {
        self.added.len() + self.removed.len()
    }

    fn absorb(&mut self, added: &[Edge], removed: &[Edge], work: u64) {
        self.added.extend_from_slice(added);
        self.removed.extend_from_slice(removed);
        self.work += work;
    }

    fn net(mut self) -> Self {
        let common: Vec<Edge> = self.added.iter().filter(|e| self.removed.contains(e)).copied().collect();
        self.added.retain(|e| !common.contains(e));
        self.removed.retain(|e| !common.contains(e));
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralMetrics {
    pub updates: u64,
    pub recourse: u64,
    pub work: u64,
    /// Updates that moved an edge between classes or in/out of the graph.
    pub structural_updates: u64,
}

/// Out-degree certificate for `E_S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArboricityReport {
    pub max_out_degree: usize,
    /// `ceil(1/beta)` plus the per-level orientation bounds of every level in use.
    pub bound: usize,
}

impl ArboricityReport {
    pub fn holds(&self) -> bool {
        self.max_out_degree <= self.bound
    }
}

/// Per-level summary in a [`GeneralSnapshot`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub index: usize,
    pub lambda: f64,
    pub top: usize,
    pub active: usize,
    pub passive: usize,
    pub output: usize,
    pub potential: usize,
}

/// Exportable state: `E_S`, `phi`, and level statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralSnapshot {
    pub n: usize,
    pub beta: f64,
    pub eps: f64,
    pub classes: usize,
    pub heavy: usize,
    pub zero: usize,
    pub sparsifier_edges: Vec<Edge>,
    pub phi: Vec<(Edge, f64)>,
    pub phi_size: f64,
    pub levels: Vec<LevelStats>,
}

#[derive(Clone, Debug)]
pub struct GeneralSparsifier {
    disc: Discretization,
    base: Params,
    graph: DynGraph,
    w: Weights<f64>,
    class: HashMap<Edge, LevelAssignment>,
    instances: Vec<Option<UniformSparsifier>>,
    heavy: IndexSet<Edge>,
    zero: IndexSet<Edge>,
    metrics: GeneralMetrics,
}

impl GeneralSparsifier {
    /// Experiment mode: `eps` and `beta` given directly.
    pub fn new(n: usize, eps: f64, beta: f64) -> Result<Self, SparsifyError> {
        let disc = Discretization::new(n, beta)?;
        let base = Params::experiment(n, eps, beta, disc.lambda(0))?;
        Ok(Self::with_base(disc, base))
    }

    /// `beta` and `eps` derived from `delta`.
    pub fn from_delta(n: usize, delta: f64) -> Result<Self, SparsifyError> {
        let (beta, eps) = crate::uniform::delta_constants(n, delta)?;
        let disc = Discretization::new(n, beta)?;
        let base = Params { n, delta: Some(delta), beta, eps, lambda: disc.lambda(0), mode: Mode::Paper };
        base.with_lambda(base.lambda)?;
        Ok(Self::with_base(disc, base))
    }

    fn with_base(disc: Discretization, base: Params) -> Self {
        let n = base.n;
        GeneralSparsifier {
            instances: vec![None; disc.top() + 1],
            disc,
            base,
            graph: DynGraph::new(n),
            w: Weights::new(n),
            class: HashMap::new(),
            heavy: IndexSet::new(),
            zero: IndexSet::new(),
            metrics: GeneralMetrics::default(),
        }
    }

    pub fn discretization(&self) -> &Discretization {
        &self.disc
    }

    pub fn params(&self) -> &Params {
        &self.base
    }

    pub fn graph(&self) -> &DynGraph {
        &self.graph
    }

    /// The input weights `w`.
    pub fn weights(&self) -> &Weights<f64> {
        &self.w
    }

    pub fn metrics(&self) -> &GeneralMetrics {
        &self.metrics
    }

    pub fn class_of(&self, e: Edge) -> Option<LevelAssignment> {
        self.class.get(&e).copied()
    }

    pub fn heavy_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.heavy.iter().copied()
    }

    pub fn zero_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.zero.iter().copied()
    }

    /// Level instances created so far.
    pub fn instances(&self) -> impl Iterator<Item = (usize, &UniformSparsifier)> {
        self.instances.iter().enumerate().filter_map(|(i, s)| s.as_ref().map(|s| (i, s)))
    }

    pub fn instance(&self, i: usize) -> Option<&UniformSparsifier> {
        self.instances.get(i)?.as_ref()
    }

    fn place(&mut self, e: Edge, cls: LevelAssignment, out: &mut GeneralOutcome) -> Result<(), SparsifyError> {
        match cls {
            LevelAssignment::Zero => {
                self.zero.insert(e);
                out.work += 1;
            }
            LevelAssignment::Heavy => {
                self.heavy.insert(e);
                out.absorb(&[e], &[], 1);
            }
            LevelAssignment::Level(i) => {
                if self.instances[i].is_none() {
                    let p = self.base.with_lambda(self.disc.lambda(i))?;
                    self.instances[i] = Some(UniformSparsifier::new(p)?);
                }
                let r = self.instances[i].as_mut().unwrap().handle_insertion(e)?;
                out.absorb(&r.added, &r.removed, r.work);
            }
        }
        self.class.insert(e, cls);
        Ok(())
    }

    fn unplace(&mut self, e: Edge, out: &mut GeneralOutcome) -> Result<(), SparsifyError> {
        let cls = self.class.remove(&e).ok_or(GraphError::MissingEdge(e))?;
        match cls {
            LevelAssignment::Zero => {
                self.zero.swap_remove(&e);
                out.work += 1;
            }
            LevelAssignment::Heavy => {
                self.heavy.swap_remove(&e);
                out.absorb(&[], &[e], 1);
            }
            LevelAssignment::Level(i) => {
                let inst = self.instances[i].as_mut().expect("level instance exists");
                let r = inst.handle_deletion(e)?;
                out.absorb(&r.added, &r.removed, r.work);
            }
        }
        Ok(())
    }

    /// Apply one update. Invalid events leave the state untouched.
    pub fn apply_update(&mut self, ev: &UpdateEvent) -> Result<GeneralOutcome, SparsifyError> {
        ev.validate(&self.graph)?;
        let mut out = GeneralOutcome::default();
        let structural = match *ev {
            UpdateEvent::Insert { edge, weight } => {
                let (cls, _) = self.disc.classify(weight)?;
                self.graph.insert(edge)?;
                self.w.set(edge, weight);
                self.place(edge, cls, &mut out)?;
                true
            }
            UpdateEvent::Delete { edge } => {
                self.unplace(edge, &mut out)?;
                self.graph.remove(edge)?;
                self.w.remove(edge);
                true
            }
            UpdateEvent::SetWeight { edge, weight } => {
                let (cls, _) = self.disc.classify(weight)?;
                self.w.set(edge, weight);
                if self.class[&edge] == cls {
                    out.work += 1;
                    false
                } else {
                    self.unplace(edge, &mut out)?;
                    self.place(edge, cls, &mut out)?;
                    true
                }
            }
        };
        let out = out.net();
        self.metrics.updates += 1;
        self.metrics.recourse += out.recourse() as u64;
        self.metrics.work += out.work;
        self.metrics.structural_updates += structural as u64;
        Ok(out)
    }

    /// `E_S`, sorted.
    pub fn sparsifier_edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = self.heavy.iter().copied().collect();
        for (_, s) in self.instances() {
            out.extend(s.sparsifier_edges());
        }
        out.sort_unstable();
        out
    }

    /// `w^`: the rounded weights.
    pub fn w_hat<S: Scalar>(&self) -> Weights<S> {
        let pairs = self.class.iter().filter_map(|(&e, &cls)| match cls {
            LevelAssignment::Zero => None,
            LevelAssignment::Heavy => Some((e, S::from_f64_lossy(self.w.get(e)))),
            LevelAssignment::Level(i) => Some((e, S::from_f64_lossy(self.disc.lambda(i)))),
        });
        Weights::from_pairs(self.base.n, pairs)
    }

    /// `phi`: `w^` on heavy edges and each level's certified matching on its
    /// output edges.
    pub fn phi<S: Scalar>(&self) -> Weights<S> {
        let mut phi = Weights::from_pairs(
            self.base.n,
            self.heavy.iter().map(|&e| (e, S::from_f64_lossy(self.w.get(e)))),
        );
        for (_, s) in self.instances() {
            for (e, x) in s.certified_matching::<S>().iter() {
                phi.set(e, x);
            }
        }
        phi
    }

    /// Whether `w^` is `(alpha, beta)`-approximately maximal in the graph.
    pub fn check_approx_maximal_pipeline(&self, alpha: f64, beta: f64) -> bool {
        is_approximately_maximal(&self.w_hat::<f64>(), &self.graph, alpha, beta)
    }

    /// Orientation of `E_S`: heavy edges from the smaller to the larger id,
    /// level edges by their level's orientation.
    pub fn orientation(&self) -> Orientation {
        let mut dir: Orientation = self.heavy.iter().map(|&e| (e, e.u())).collect();
        for (_, s) in self.instances() {
            let out = s.orientation();
            for e in s.sparsifier_edges() {
                dir.insert(e, out[&e]);
            }
        }
        dir
    }

    pub fn arboricity(&self) -> ArboricityReport {
        let degrees = out_degrees(self.base.n, &self.orientation());
        let mut bound = (1.0 / self.base.beta).ceil() as usize;
        for (_, s) in self.instances() {
            let (low, high) = s.params().orientation_bounds();
            bound += low.max(high);
        }
        ArboricityReport { max_out_degree: degrees.into_iter().max().unwrap_or(0), bound }
    }

    /// Partition, rounding sandwich, and every level's invariants.
    pub fn check_invariants(&self) -> InvariantReport {
        let mut checks = Vec::new();
        let parts = self.zero.len()
            + self.heavy.len()
            + self.instances().map(|(_, s)| s.edge_count()).sum::<usize>();
        let partition = if parts != self.graph.edge_count() || self.class.len() != parts {
            Err(format!("{parts} classified edges for {} graph edges", self.graph.edge_count()))
        } else {
            self.class.iter().try_for_each(|(&e, &cls)| {
                let home = match cls {
                    LevelAssignment::Zero => self.zero.contains(&e),
                    LevelAssignment::Heavy => self.heavy.contains(&e),
                    LevelAssignment::Level(i) => self.instance(i).is_some_and(|s| s.contains(e)),
                };
                if home {
                    Ok(())
                } else {
                    Err(format!("edge {e} missing from class {cls:?}"))
                }
            })
        };
        checks.push(CheckResult::new("class_partition", partition));

        let n2 = (self.base.n * self.base.n) as f64;
        let beta = self.base.beta;
        let w_hat = self.w_hat::<f64>();
        let sandwich = self.graph.sorted_edges().into_iter().try_for_each(|e| {
            let (x, r) = (self.w.get(e), w_hat.get(e));
            let ok = if x >= beta { r == x } else { r <= x + 1e-9 && x <= (1.0 + beta) * r + beta / n2 + 1e-9 };
            if ok {
                Ok(())
            } else {
                Err(format!("edge {e}: w = {x}, w^ = {r}"))
            }
        });
        checks.push(CheckResult::new("rounding_sandwich", sandwich));

        for (i, s) in self.instances() {
            for c in s.check_invariants().checks {
                checks.push(CheckResult { name: format!("level{i}.{}", c.name), ..c });
            }
        }
        InvariantReport { checks }
    }

    pub fn snapshot(&self) -> GeneralSnapshot {
        let phi = self.phi::<f64>();
        let phi_pairs: BTreeMap<Edge, f64> = phi.iter().collect();
        GeneralSnapshot {
            n: self.base.n,
            beta: self.base.beta,
            eps: self.base.eps,
            classes: self.disc.top() + 1,
            heavy: self.heavy.len(),
            zero: self.zero.len(),
            sparsifier_edges: self.sparsifier_edges(),
            phi_size: phi.size(),
            phi: phi_pairs.into_iter().collect(),
            levels: self
                .instances()
                .map(|(i, s)| LevelStats {
                    index: i,
                    lambda: s.params().lambda,
                    top: s.levels(),
                    active: s.active_count(),
                    passive: s.passive_count(),
                    output: s.sparsifier_edges().len(),
                    potential: s.metrics().potential,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(a: usize, b: usize) -> Edge {
        Edge::new(a, b)
    }

    fn ins(a: usize, b: usize, w: f64) -> UpdateEvent {
        UpdateEvent::Insert { edge: e(a, b), weight: w }
    }

    #[test]
    fn heavy_edges_pass_through() {
        let mut g = GeneralSparsifier::new(6, 0.2, 0.2).unwrap();
        let out = g.apply_update(&ins(0, 1, 0.5)).unwrap();
        assert_eq!(out.added, vec![e(0, 1)]);
        g.apply_update(&ins(2, 3, 0.3)).unwrap();
        assert_eq!(g.sparsifier_edges(), vec![e(0, 1), e(2, 3)]);
        let phi: Weights<f64> = g.phi();
        assert_eq!(phi, *g.weights());
        assert!(g.check_approx_maximal_pipeline(0.6, 0.2));
    }

    #[test]
    fn zero_edges_never_reach_the_output() {
        let mut g = GeneralSparsifier::new(6, 0.2, 0.2).unwrap();
        g.apply_update(&ins(0, 1, 1e-4)).unwrap();
        g.apply_update(&ins(1, 2, 0.0)).unwrap();
        assert!(g.sparsifier_edges().is_empty());
        assert_eq!(g.zero_edges().count(), 2);
        assert!(g.check_invariants().all_passed());
    }

    #[test]
    fn same_bracket_weight_change_is_free() {
        let mut g = GeneralSparsifier::new(6, 0.2, 0.2).unwrap();
        g.apply_update(&ins(0, 1, 0.05)).unwrap();
        let before = g.sparsifier_edges();
        let cls = g.class_of(e(0, 1));
        let out = g.apply_update(&UpdateEvent::SetWeight { edge: e(0, 1), weight: 0.0501 }).unwrap();
        assert_eq!(out.recourse(), 0);
        assert_eq!(g.class_of(e(0, 1)), cls);
        assert_eq!(g.sparsifier_edges(), before);
        assert_eq!(g.metrics().structural_updates, 1);
    }

    #[test]
    fn level_to_heavy_migration() {
        let mut g = GeneralSparsifier::new(6, 0.2, 0.2).unwrap();
        g.apply_update(&ins(0, 1, 0.05)).unwrap();
        let Some(LevelAssignment::Level(i)) = g.class_of(e(0, 1)) else { panic!() };
        assert_eq!(g.instance(i).unwrap().edge_count(), 1);
        g.apply_update(&UpdateEvent::SetWeight { edge: e(0, 1), weight: 0.5 }).unwrap();
        assert_eq!(g.class_of(e(0, 1)), Some(LevelAssignment::Heavy));
        assert_eq!(g.instance(i).unwrap().edge_count(), 0);
        assert_eq!(g.sparsifier_edges(), vec![e(0, 1)]);
        assert!(g.check_invariants().all_passed());
    }

    #[test]
    fn invalid_events_rejected() {
        let mut g = GeneralSparsifier::new(6, 0.2, 0.2).unwrap();
        g.apply_update(&ins(0, 1, 0.5)).unwrap();
        assert!(g.apply_update(&ins(0, 1, 0.5)).is_err());
        assert!(g.apply_update(&UpdateEvent::Delete { edge: e(2, 3) }).is_err());
        assert!(g.apply_update(&ins(2, 3, 1.5)).is_err());
        assert_eq!(g.graph().edge_count(), 1);
    }

    #[test]
    fn delete_returns_to_empty() {
        let mut g = GeneralSparsifier::new(8, 0.2, 0.2).unwrap();
        let ws = [0.5, 0.05, 0.01, 0.001, 0.12];
        for (k, &x) in ws.iter().enumerate() {
            g.apply_update(&ins(k, k + 1, x)).unwrap();
        }
        for k in 0..ws.len() {
            g.apply_update(&UpdateEvent::Delete { edge: e(k, k + 1) }).unwrap();
        }
        assert!(g.sparsifier_edges().is_empty());
        assert!(g.check_invariants().all_passed());
    }
}
