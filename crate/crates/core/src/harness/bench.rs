//! Recourse and work measured across graph sizes.

use serde::{Deserialize, Serialize};

use super::runner::{run, RunConfig, RunError};
use super::tracegen::{generate, StreamKind, TraceSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub eps: f64,
    pub beta: f64,
    pub kind: StreamKind,
    /// Events per trace are `updates_per_node * n`.
    pub updates_per_node: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![50, 100, 200, 400],
            eps: 0.2,
            beta: 0.2,
            kind: StreamKind::RandomInsertDelete,
            updates_per_node: 20,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub updates: usize,
    pub mean_recourse: f64,
    pub max_recourse: usize,
    pub mean_work: f64,
    pub final_output: usize,
    pub mean_update_us: f64,
}

/// Ratio of means between `n` and `factor * n`, for every such pair of rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Growth {
    pub from_n: usize,
    pub to_n: usize,
    pub recourse_ratio: f64,
    pub work_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub rows: Vec<ScalingRow>,
    pub growth: Vec<Growth>,
}

impl BenchReport {
    /// Largest recourse or work ratio over all `n -> factor n` pairs.
    pub fn worst_growth(&self) -> f64 {
        self.growth.iter().map(|g| g.recourse_ratio.max(g.work_ratio)).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,updates,mean_recourse,max_recourse,mean_work,final_output,mean_update_us\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.n, r.updates, r.mean_recourse, r.max_recourse, r.mean_work, r.final_output, r.mean_update_us
            ));
        }
        s
    }
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else if a > 0.0 {
        f64::INFINITY
    } else {
        1.0
    }
}

pub fn growth(rows: &[ScalingRow], factor: usize) -> Vec<Growth> {
    let mut out = Vec::new();
    for a in rows {
        if let Some(b) = rows.iter().find(|b| b.n == a.n * factor) {
            out.push(Growth {
                from_n: a.n,
                to_n: b.n,
                recourse_ratio: ratio(b.mean_recourse, a.mean_recourse),
                work_ratio: ratio(b.mean_work, a.mean_work),
            });
        }
    }
    out
}

/// Run the general sparsifier on one generated trace per size.
pub fn scaling(cfg: &BenchConfig) -> Result<BenchReport, RunError> {
    let mut rows = Vec::new();
    for &n in &cfg.sizes {
        let events = generate(&TraceSpec::new(n, cfg.kind, cfg.updates_per_node * n, cfg.seed));
        let report = run(&events, &RunConfig::experiment(n, cfg.eps, cfg.beta))?;
        log::info!("bench n={n}: mean recourse {:.3}, mean work {:.1}", report.mean_recourse, report.mean_work);
        rows.push(ScalingRow {
            n,
            updates: report.updates,
            mean_recourse: report.mean_recourse,
            max_recourse: report.recourse.iter().copied().max().unwrap_or(0),
            mean_work: report.mean_work,
            final_output: report.final_output,
            mean_update_us: report.timings.mean_update_us,
        });
    }
    let growth = growth(&rows, 4);
    Ok(BenchReport { config: cfg.clone(), rows, growth })
}
