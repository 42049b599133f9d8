use serde::{Deserialize, Serialize};

use crate::graph::Edge;

/// A clean-up plus rebuild triggered by an update.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RebuildRecord {
    /// First rebuilt level; 0 for a full rebuild.
    pub from_level: usize,
    /// `sum_{i >= from} |D^(>=i)|` just before the clean-up.
    pub cleared_dead: usize,
    /// `|E_(p)|` merged into the active set (full rebuilds only).
    pub cleared_passive: usize,
    pub work: u64,
}

/// Effect of one update on `F_(a)` and on the potential.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpdateOutcome {
    /// Edges that entered `F_(a)`.
    pub added: Vec<Edge>,
    /// Edges that left `F_(a)`.
    pub removed: Vec<Edge>,
    pub work: u64,
    pub phi_before: usize,
    pub phi_after: usize,
    pub rebuild: Option<RebuildRecord>,
}

impl UpdateOutcome {
    pub fn recourse(&self) -> usize {
        self.added.len() + self.removed.len()
    }
}

/// Running counters of a uniform sparsifier.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    /// `|E_(p)| + sum_i |D^(>=i)|`
    pub potential: usize,
    pub updates: u64,
    pub work: u64,
    pub recourse: u64,
    pub full_rebuilds: u64,
    pub partial_rebuilds: u64,
    /// Work of the initial build, not attributed to any update.
    pub build_work: u64,
}

impl Metrics {
    pub(crate) fn record(&mut self, out: &UpdateOutcome) {
        self.updates += 1;
        self.work += out.work;
        self.recourse += out.recourse() as u64;
        self.potential = out.phi_after;
        match out.rebuild {
            Some(r) if r.from_level == 0 && r.cleared_passive > 0 => self.full_rebuilds += 1,
            Some(_) => self.partial_rebuilds += 1,
            None => {}
        }
    }
}
