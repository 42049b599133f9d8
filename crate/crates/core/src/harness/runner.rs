//! Replay an update stream through a sparsifier and collect a report.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{GraphError, SparsifyError};
use crate::general::{ArboricityReport, GeneralSparsifier};
use crate::graph::{DynGraph, Edge, UpdateEvent};
use crate::oracles::analogous::analogous_static_hierarchy;
use crate::oracles::matching::max_matching_edges;
use crate::oracles::orientation::verify_orientation;
use crate::uniform::{Mode, Params, UniformSparsifier, UpdateOutcome};
use crate::weights::Weights;

pub const SCHEMA_VERSION: u32 = 1;
const TOL: f64 = 1e-9;

/// Which checks a run performs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    /// Invariants after every event.
    pub invariants: bool,
    /// Live hierarchy against the static recomputation, every `k` events.
    pub equivalence: bool,
    /// Certificate matching bounds at the end.
    pub certificate: bool,
    /// Out-degree bounds at the end and at every equivalence checkpoint.
    pub orientation: bool,
    /// Exact matching sizes of `G` and `S` at the end.
    pub matching: bool,
}

impl Checks {
    pub const NAMES: [&'static str; 5] = ["invariants", "equivalence", "certificate", "orientation", "matching"];

    pub fn all() -> Self {
        Checks { invariants: true, equivalence: true, certificate: true, orientation: true, matching: true }
    }

    pub fn none() -> Self {
        Checks::default()
    }
}

impl std::str::FromStr for Checks {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut c = Checks::none();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "all" => c = Checks::all(),
                "none" => c = Checks::none(),
                "invariants" => c.invariants = true,
                "equivalence" => c.equivalence = true,
                "certificate" => c.certificate = true,
                "orientation" => c.orientation = true,
                "matching" => c.matching = true,
                other => return Err(format!("unknown check {other:?}; expected one of {:?}", Checks::NAMES)),
            }
        }
        Ok(c)
    }
}

/// What the events are fed into.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum Target {
    General,
    /// A single uniform sparsifier; inserted weights are ignored.
    Uniform { lambda: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n: usize,
    pub eps: f64,
    pub beta: f64,
    pub delta: Option<f64>,
    pub mode: Mode,
    pub target: Target,
    pub checks: Checks,
    pub equivalence_every: usize,
    /// Treat the leading insertions as the initial graph: build it at once
    /// and report its output size separately from per-update recourse.
    pub static_prefix: bool,
}

impl RunConfig {
    pub fn experiment(n: usize, eps: f64, beta: f64) -> Self {
        RunConfig {
            n,
            eps,
            beta,
            delta: None,
            mode: Mode::Experiment,
            target: Target::General,
            checks: Checks::none(),
            equivalence_every: 100,
            static_prefix: false,
        }
    }

    pub fn from_delta(n: usize, delta: f64) -> Result<Self, SparsifyError> {
        let (beta, eps) = crate::uniform::delta_constants(n, delta)?;
        Ok(RunConfig { delta: Some(delta), mode: Mode::Paper, ..RunConfig::experiment(n, eps, beta) })
    }

    pub fn uniform(mut self, lambda: f64) -> Self {
        self.target = Target::Uniform { lambda };
        self
    }

    pub fn with_checks(mut self, checks: Checks) -> Self {
        self.checks = checks;
        self
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Setup(#[from] SparsifyError),
    #[error("event {index}: {source}")]
    Event { index: usize, source: SparsifyError },
    #[error("event {index}: weight changes need the general sparsifier")]
    Unsupported { index: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    pub runs: u64,
    pub failures: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl CheckSummary {
    fn new(name: &str) -> Self {
        CheckSummary { name: name.to_string(), ..Default::default() }
    }

    fn record(&mut self, outcome: Result<(), String>) {
        self.runs += 1;
        if let Err(msg) = outcome {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(msg);
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Ratios {
    /// `size(w)` of the input (`lambda |E|` in uniform mode).
    pub size_w: Option<f64>,
    /// `size(phi)`, or `size(h')` in uniform mode.
    pub size_certificate: Option<f64>,
    pub size_ratio: Option<f64>,
    pub size_bound: Option<f64>,
    pub mu_g: Option<usize>,
    pub mu_s: Option<usize>,
    pub mu_ratio: Option<f64>,
    /// `2 / (1 - 2000 eps log2 n)`, when positive.
    pub mu_bound: Option<f64>,
    /// Whether the rounded weights are `(3 beta, beta)`-approximately maximal.
    pub approx_maximal: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamBlock {
    pub n: usize,
    pub eps: f64,
    pub beta: f64,
    pub delta: Option<f64>,
    pub mode: Option<Mode>,
    pub uniform_lambda: Option<f64>,
    /// `L` of the uniform sparsifier.
    pub levels: Option<usize>,
    /// `K + 1` of the general sparsifier.
    pub classes: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: f64,
    pub mean_update_us: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub params: ParamBlock,
    pub updates: usize,
    /// Output size right after the static prefix was built.
    pub build_output: usize,
    pub recourse: Vec<usize>,
    pub total_recourse: u64,
    pub mean_recourse: f64,
    pub total_work: u64,
    pub mean_work: f64,
    pub final_edges: usize,
    pub final_output: usize,
    pub checks: Vec<CheckSummary>,
    pub ratios: Ratios,
    pub arboricity: Option<ArboricityReport>,
    pub timings: Timings,
    pub passed: bool,
}

impl RunReport {
    /// The report with timing fields zeroed, for determinism comparisons.
    pub fn without_timings(&self) -> Self {
        RunReport { timings: Timings::default(), ..self.clone() }
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Recourse, work, and the potential check of a uniform update.
type Applied = (usize, u64, Option<Result<(), String>>);

enum Engine {
    General(Box<GeneralSparsifier>),
    Uniform { s: Box<UniformSparsifier>, graph: DynGraph },
}

/// Potential bookkeeping of one uniform update.
fn potential_step(out: &UpdateOutcome, ev: &UpdateEvent, top: usize) -> Result<(), String> {
    let cleared = out.rebuild.map_or(0, |r| r.cleared_dead + r.cleared_passive);
    let raised = out.phi_after + cleared;
    let ok = match ev {
        UpdateEvent::Insert { .. } => raised == out.phi_before + 1,
        // a passive deletion lowers the potential by one
        _ => raised + 1 == out.phi_before || (raised > out.phi_before && raised - out.phi_before <= top + 1),
    };
    if ok {
        Ok(())
    } else {
        Err(format!("phi {} -> {} with {cleared} cleared on {ev:?}", out.phi_before, out.phi_after))
    }
}

impl Engine {
    fn new(cfg: &RunConfig) -> Result<Self, SparsifyError> {
        Ok(match cfg.target {
            Target::General => {
                let g = match cfg.mode {
                    Mode::Paper => GeneralSparsifier::from_delta(cfg.n, cfg.delta.ok_or(crate::ParamError::BadDelta(0.0))?)?,
                    Mode::Experiment => GeneralSparsifier::new(cfg.n, cfg.eps, cfg.beta)?,
                };
                Engine::General(Box::new(g))
            }
            Target::Uniform { lambda } => {
                let p = match cfg.mode {
                    Mode::Paper => Params::from_delta(cfg.n, cfg.delta.ok_or(crate::ParamError::BadDelta(0.0))?, lambda)?,
                    Mode::Experiment => {
                        Params { delta: cfg.delta, ..Params::experiment(cfg.n, cfg.eps, cfg.beta, lambda)? }
                    }
                };
                Engine::Uniform { s: Box::new(UniformSparsifier::new(p)?), graph: DynGraph::new(cfg.n) }
            }
        })
    }

    fn build(&mut self, prefix: &[UpdateEvent]) -> Result<(), RunError> {
        match self {
            Engine::General(g) => {
                for (index, ev) in prefix.iter().enumerate() {
                    g.apply_update(ev).map_err(|source| RunError::Event { index, source })?;
                }
            }
            Engine::Uniform { s, graph } => {
                for (index, ev) in prefix.iter().enumerate() {
                    graph.insert(ev.edge()).map_err(|e| RunError::Event { index, source: e.into() })?;
                }
                **s = UniformSparsifier::static_build(graph, *s.params())?;
            }
        }
        Ok(())
    }

    fn output_len(&self) -> usize {
        match self {
            Engine::General(g) => g.sparsifier_edges().len(),
            Engine::Uniform { s, .. } => s.sparsifier_edges().len(),
        }
    }

    /// Apply one event; returns `(recourse, work, potential check)`.
    fn apply(&mut self, index: usize, ev: &UpdateEvent) -> Result<Applied, RunError> {
        let wrap = |source: SparsifyError| RunError::Event { index, source };
        match self {
            Engine::General(g) => {
                let out = g.apply_update(ev).map_err(wrap)?;
                Ok((out.recourse(), out.work, None))
            }
            Engine::Uniform { s, graph } => {
                ev.validate(graph).map_err(|e| wrap(e.into()))?;
                let out = match *ev {
                    UpdateEvent::Insert { edge, .. } => {
                        let cap = (1.0 / s.params().lambda + TOL).floor() as usize;
                        for v in edge.endpoints() {
                            if graph.degree(v) + 1 > cap {
                                return Err(wrap(SparsifyError::NotFractional { node: v, degree: graph.degree(v) + 1 }));
                            }
                        }
                        graph.insert(edge).map_err(|e| wrap(e.into()))?;
                        s.handle_insertion(edge).map_err(|e| wrap(e.into()))?
                    }
                    UpdateEvent::Delete { edge } => {
                        graph.remove(edge).map_err(|e| wrap(e.into()))?;
                        s.handle_deletion(edge).map_err(|e| wrap(e.into()))?
                    }
                    UpdateEvent::SetWeight { .. } => return Err(RunError::Unsupported { index }),
                };
                let pot = potential_step(&out, ev, s.levels());
                Ok((out.recourse(), out.work, Some(pot)))
            }
        }
    }

    fn invariants(&self) -> Result<(), String> {
        let report = match self {
            Engine::General(g) => g.check_invariants(),
            Engine::Uniform { s, .. } => s.check_invariants(),
        };
        let first = report.failures().next().map(|c| format!("{}: {}", c.name, c.detail.clone().unwrap_or_default()));
        first.map_or(Ok(()), Err)
    }

    fn uniform_parts(&self) -> Vec<(String, &UniformSparsifier)> {
        match self {
            Engine::General(g) => g.instances().map(|(i, s)| (format!("level {i}"), s)).collect(),
            Engine::Uniform { s, .. } => vec![("uniform".to_string(), s.as_ref())],
        }
    }

    fn equivalence(&self) -> Result<(), String> {
        for (name, s) in self.uniform_parts() {
            let want = analogous_static_hierarchy(&s.analogous_input());
            let diff = s.snapshot().diff(&want);
            if !diff.is_empty() {
                return Err(format!("{name}: {}", diff.join(", ")));
            }
        }
        Ok(())
    }

    fn orientation(&self) -> Result<(), String> {
        for (name, s) in self.uniform_parts() {
            let dir = s.orientation();
            let (low, high) = s.params().orientation_bounds();
            let frozen = dir.keys().copied().collect::<Vec<Edge>>();
            match verify_orientation(frozen, &dir, low, high, &s.node_levels(), s.levels()) {
                Ok(true) => {}
                Ok(false) => return Err(format!("{name}: out-degree above ({low}, {high})")),
                Err(e) => return Err(format!("{name}: {e}")),
            }
        }
        if let Engine::General(g) = self {
            let a = g.arboricity();
            if !a.holds() {
                return Err(format!("union out-degree {} above {}", a.max_out_degree, a.bound));
            }
        }
        Ok(())
    }

    fn certificate(&self, ratios: &mut Ratios) -> Result<(), String> {
        match self {
            Engine::General(g) => {
                let p = g.params();
                let phi: Weights<f64> = g.phi();
                let w_hat: Weights<f64> = g.w_hat();
                if !phi.validate_fractional(g.graph()).map_err(|e| e.to_string())? {
                    return Err("phi is not a fractional matching".into());
                }
                if let Some(v) = (0..p.n).find(|&v| phi.node_weight(v) > w_hat.node_weight(v) + TOL) {
                    return Err(format!("phi({v}) > w^({v})"));
                }
                let (sw, sp) = (g.weights().size(), phi.size());
                let bound = (1.0 + 3.0 * p.beta) * (1.0 + 120.0 * p.eps * (p.n as f64).log2());
                ratios.size_w = Some(sw);
                ratios.size_certificate = Some(sp);
                ratios.size_ratio = (sp > 0.0).then(|| sw / sp);
                ratios.size_bound = Some(bound);
                if sw >= 1.0 && sw > bound * sp + TOL {
                    return Err(format!("size(w) = {sw} > {bound} * size(phi) = {}", bound * sp));
                }
                Ok(())
            }
            Engine::Uniform { s, .. } => {
                let h: Weights<f64> = s.certified_matching();
                let w: Weights<f64> = s.full_uniform();
                let beta = s.params().beta;
                if let Some((e, x)) = h.iter().find(|&(_, x)| x >= beta) {
                    return Err(format!("h'({e}) = {x} >= beta"));
                }
                if let Some(v) = (0..s.params().n).find(|&v| h.node_weight(v) > w.node_weight(v) + TOL) {
                    return Err(format!("h'({v}) > w({v})"));
                }
                let (sw, sh) = (w.size(), h.size());
                let bound = s.params().certificate_factor();
                ratios.size_w = Some(sw);
                ratios.size_certificate = Some(sh);
                ratios.size_ratio = (sh > 0.0).then(|| sw / sh);
                ratios.size_bound = Some(bound);
                if sw > bound * sh + TOL {
                    return Err(format!("size(w) = {sw} > {bound} * size(h') = {}", bound * sh));
                }
                Ok(())
            }
        }
    }

    fn matching(&self, ratios: &mut Ratios) -> Option<Result<(), String>> {
        let (n, g_edges, s_edges) = match self {
            Engine::General(g) => (g.params().n, g.graph().sorted_edges(), g.sparsifier_edges()),
            Engine::Uniform { s, graph } => (s.params().n, graph.sorted_edges(), s.sparsifier_edges()),
        };
        let mu_g = max_matching_edges(n, &g_edges).size();
        let mu_s = max_matching_edges(n, &s_edges).size();
        ratios.mu_g = Some(mu_g);
        ratios.mu_s = Some(mu_s);
        ratios.mu_ratio = (mu_s > 0).then(|| mu_g as f64 / mu_s as f64);
        let Engine::General(g) = self else { return None };
        let p = g.params();
        let denom = 1.0 - 2000.0 * p.eps * (p.n as f64).log2();
        let maximal = g.check_approx_maximal_pipeline(3.0 * p.beta, p.beta);
        ratios.approx_maximal = Some(maximal);
        if denom <= 0.0 {
            return None;
        }
        let bound = 2.0 / denom;
        ratios.mu_bound = Some(bound);
        if !maximal {
            return None;
        }
        Some(if mu_g as f64 <= mu_s as f64 * bound + TOL {
            Ok(())
        } else {
            Err(format!("mu(G) = {mu_g} > {bound} * mu(S) = {}", bound * mu_s as f64))
        })
    }

    fn params(&self, cfg: &RunConfig) -> ParamBlock {
        let mut p = ParamBlock {
            n: cfg.n,
            eps: cfg.eps,
            beta: cfg.beta,
            delta: cfg.delta,
            mode: Some(cfg.mode),
            ..Default::default()
        };
        match self {
            Engine::General(g) => {
                p.eps = g.params().eps;
                p.beta = g.params().beta;
                p.classes = Some(g.discretization().top() + 1);
            }
            Engine::Uniform { s, .. } => {
                p.eps = s.params().eps;
                p.beta = s.params().beta;
                p.uniform_lambda = Some(s.params().lambda);
                p.levels = Some(s.levels());
            }
        }
        p
    }
}

/// Replay `events` under `cfg`. Check failures are reported, not raised;
/// malformed events abort the run.
pub fn run(events: &[UpdateEvent], cfg: &RunConfig) -> Result<RunReport, RunError> {
    let start = Instant::now();
    let mut engine = Engine::new(cfg)?;
    let prefix = if cfg.static_prefix {
        events.iter().take_while(|e| matches!(e, UpdateEvent::Insert { .. })).count()
    } else {
        0
    };
    engine.build(&events[..prefix])?;

    let mut report = RunReport {
        schema_version: SCHEMA_VERSION,
        params: engine.params(cfg),
        build_output: engine.output_len(),
        ..Default::default()
    };
    let mut inv = CheckSummary::new("invariants");
    let mut pot = CheckSummary::new("potential");
    let mut equiv = CheckSummary::new("equivalence");
    let mut orient = CheckSummary::new("orientation");
    let mut cert = CheckSummary::new("certificate");
    let mut matching = CheckSummary::new("matching");

    let every = cfg.equivalence_every.max(1);
    let updates_start = Instant::now();
    for (k, ev) in events[prefix..].iter().enumerate() {
        let (rec, work, pstep) = engine.apply(prefix + k, ev)?;
        report.recourse.push(rec);
        report.total_recourse += rec as u64;
        report.total_work += work;
        if cfg.checks.invariants {
            inv.record(engine.invariants());
            if let Some(step) = pstep {
                pot.record(step);
            }
        }
        if (k + 1) % every == 0 {
            if cfg.checks.equivalence {
                equiv.record(engine.equivalence());
            }
            if cfg.checks.orientation {
                orient.record(engine.orientation());
            }
        }
    }
    let update_time = updates_start.elapsed();

    if cfg.checks.invariants {
        inv.record(engine.invariants());
    }
    if cfg.checks.equivalence {
        equiv.record(engine.equivalence());
    }
    if cfg.checks.orientation {
        orient.record(engine.orientation());
        if let Engine::General(g) = &engine {
            report.arboricity = Some(g.arboricity());
        }
    }
    if cfg.checks.certificate {
        cert.record(engine.certificate(&mut report.ratios));
    }
    if cfg.checks.matching {
        if let Some(r) = engine.matching(&mut report.ratios) {
            matching.record(r);
        }
    }

    let enabled = [
        (cfg.checks.invariants, inv),
        (cfg.checks.invariants && matches!(engine, Engine::Uniform { .. }), pot),
        (cfg.checks.equivalence, equiv),
        (cfg.checks.orientation, orient),
        (cfg.checks.certificate, cert),
        (cfg.checks.matching, matching),
    ];
    report.checks = enabled.into_iter().filter(|(on, _)| *on).map(|(_, c)| c).collect();
    report.passed = report.checks.iter().all(|c| c.failures == 0);

    report.updates = events.len() - prefix;
    if report.updates > 0 {
        report.mean_recourse = report.total_recourse as f64 / report.updates as f64;
        report.mean_work = report.total_work as f64 / report.updates as f64;
        report.timings.mean_update_us = update_time.as_secs_f64() * 1e6 / report.updates as f64;
    }
    report.final_output = engine.output_len();
    report.final_edges = match &engine {
        Engine::General(g) => g.graph().edge_count(),
        Engine::Uniform { graph, .. } => graph.edge_count(),
    };
    report.timings.total_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

impl From<GraphError> for RunError {
    fn from(e: GraphError) -> Self {
        RunError::Setup(e.into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::tracegen::{generate, StreamKind, TraceSpec};

    #[test]
    fn parse_checks() {
        assert_eq!("all".parse::<Checks>().unwrap(), Checks::all());
        let c: Checks = "invariants, matching".parse().unwrap();
        assert!(c.invariants && c.matching && !c.equivalence);
        assert!("bogus".parse::<Checks>().is_err());
    }

    #[test]
    fn empty_trace_passes_vacuously() {
        let cfg = RunConfig::experiment(10, 0.2, 0.2).with_checks(Checks::all());
        let r = run(&[], &cfg).unwrap();
        assert_eq!(r.updates, 0);
        assert!(r.passed);
    }

    #[test]
    fn uniform_static_graph() {
        let spec = TraceSpec::uniform(40, StreamKind::Decremental, 200, 1, 0.025);
        let inserts: Vec<UpdateEvent> =
            generate(&spec).into_iter().filter(|e| matches!(e, UpdateEvent::Insert { .. })).collect();
        let cfg = RunConfig { static_prefix: true, ..RunConfig::experiment(40, 0.2, 0.2).uniform(0.025) }
            .with_checks(Checks::all());
        let r = run(&inserts, &cfg).unwrap();
        assert_eq!(r.updates, 0);
        assert_eq!(r.build_output, r.final_output);
        assert!(r.build_output > 0);
        assert_eq!(r.total_recourse, 0);
        assert!(r.passed, "{:?}", r.checks);
    }

    #[test]
    fn general_random_stream_passes_all_checks() {
        let evs = generate(&TraceSpec::new(40, StreamKind::RandomInsertDelete, 1500, 2));
        let cfg = RunConfig { equivalence_every: 50, ..RunConfig::experiment(40, 0.2, 0.2) }.with_checks(Checks::all());
        let r = run(&evs, &cfg).unwrap();
        assert!(r.passed, "{:#?}", r.checks);
        assert_eq!(r.recourse.len(), r.updates);
    }

    #[test]
    fn report_is_deterministic() {
        let evs = generate(&TraceSpec::new(30, StreamKind::WeightChurn, 800, 3));
        let cfg = RunConfig::experiment(30, 0.2, 0.2).with_checks(Checks::all());
        let a = run(&evs, &cfg).unwrap();
        let b = run(&evs, &cfg).unwrap();
        assert_eq!(a.without_timings(), b.without_timings());
    }

    #[test]
    fn uniform_rejects_weight_changes() {
        let evs = vec![
            UpdateEvent::Insert { edge: Edge::new(0, 1), weight: 0.1 },
            UpdateEvent::SetWeight { edge: Edge::new(0, 1), weight: 0.2 },
        ];
        let cfg = RunConfig::experiment(4, 0.2, 0.2).uniform(0.05);
        assert!(matches!(run(&evs, &cfg), Err(RunError::Unsupported { index: 1 })));
    }
}
