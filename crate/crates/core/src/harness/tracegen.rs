//! Seeded generation of update streams that keep `w` a fractional matching.

use std::collections::VecDeque;

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Edge, NodeId, UpdateEvent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StreamKind {
    RandomInsertDelete,
    /// `length / 2` insertions, then as many deletions.
    Decremental,
    /// Insert fresh edges; once `window` edges are present, every insertion
    /// is followed by deleting the oldest edge.
    SlidingWindow,
    /// A fill phase of insertions, then mostly weight changes.
    WeightChurn,
}

impl std::str::FromStr for StreamKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random-insert-delete" => Ok(StreamKind::RandomInsertDelete),
            "decremental" => Ok(StreamKind::Decremental),
            "sliding-window" => Ok(StreamKind::SlidingWindow),
            "weight-churn" => Ok(StreamKind::WeightChurn),
            other => Err(format!(
                "unknown stream kind {other:?}; expected random-insert-delete, decremental, sliding-window or weight-churn"
            )),
        }
    }
}

/// Distribution of requested edge weights, before capping at node slack.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "kebab-case")]
pub enum WeightDist {
    Constant { value: f64 },
    Uniform { lo: f64, hi: f64 },
    /// `exp` of a uniform draw between `ln lo` and `ln hi`.
    LogUniform { lo: f64, hi: f64 },
}

impl WeightDist {
    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            WeightDist::Constant { value } => value,
            WeightDist::Uniform { lo, hi } => rng.gen_range(lo..=hi),
            WeightDist::LogUniform { lo, hi } => rng.gen_range(lo.ln()..=hi.ln()).exp(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSpec {
    pub n: usize,
    pub kind: StreamKind,
    pub length: usize,
    pub seed: u64,
    pub weights: WeightDist,
    pub bipartite: bool,
    /// Edge count kept by [`StreamKind::SlidingWindow`]; defaults to `2n`.
    #[serde(default)]
    pub window: Option<usize>,
}

impl TraceSpec {
    pub fn new(n: usize, kind: StreamKind, length: usize, seed: u64) -> Self {
        TraceSpec {
            n,
            kind,
            length,
            seed,
            weights: WeightDist::LogUniform { lo: 1e-4, hi: 0.5 },
            bipartite: false,
            window: None,
        }
    }

    /// Constant weight `lambda` on every edge, for a single uniform sparsifier.
    pub fn uniform(n: usize, kind: StreamKind, length: usize, seed: u64, lambda: f64) -> Self {
        TraceSpec { weights: WeightDist::Constant { value: lambda }, ..TraceSpec::new(n, kind, length, seed) }
    }
}

const SLACK_TOL: f64 = 1e-9;
const PAIR_TRIES: usize = 64;

/// Live state while generating: present edges with weights, and node loads.
struct Gen {
    spec: TraceSpec,
    rng: ChaCha8Rng,
    edges: IndexMap<Edge, f64>,
    load: Vec<f64>,
    out: Vec<UpdateEvent>,
}

impl Gen {
    fn slack(&self, v: NodeId) -> f64 {
        (1.0 - self.load[v]).max(0.0)
    }

    fn random_pair(&mut self) -> Option<Edge> {
        let n = self.spec.n;
        if n < 2 {
            return None;
        }
        let (a, b) = if self.spec.bipartite {
            let half = n / 2;
            if half == 0 || half == n {
                return None;
            }
            (self.rng.gen_range(0..half), self.rng.gen_range(half..n))
        } else {
            let a = self.rng.gen_range(0..n);
            let mut b = self.rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            (a, b)
        };
        Some(Edge::new(a, b))
    }

    /// Requested weight capped at the endpoints' slack; `None` if it no
    /// longer fits (a constant weight is never shrunk).
    fn fit(&self, e: Edge, want: f64) -> Option<f64> {
        let room = self.slack(e.u()).min(self.slack(e.v()));
        match self.spec.weights {
            WeightDist::Constant { value } => (value <= room + SLACK_TOL).then_some(value),
            _ => {
                let x = want.min(room);
                (x > 0.0).then_some(x)
            }
        }
    }

    fn try_insert(&mut self) -> bool {
        for _ in 0..PAIR_TRIES {
            let Some(e) = self.random_pair() else { return false };
            if self.edges.contains_key(&e) {
                continue;
            }
            let want = self.spec.weights.sample(&mut self.rng);
            if let Some(x) = self.fit(e, want) {
                self.insert(e, x);
                return true;
            }
        }
        false
    }

    fn insert(&mut self, e: Edge, x: f64) {
        self.edges.insert(e, x);
        self.load[e.u()] += x;
        self.load[e.v()] += x;
        self.out.push(UpdateEvent::Insert { edge: e, weight: x });
    }

    fn delete(&mut self, e: Edge) {
        let x = self.edges.swap_remove(&e).expect("present edge");
        self.load[e.u()] -= x;
        self.load[e.v()] -= x;
        self.out.push(UpdateEvent::Delete { edge: e });
    }

    fn delete_random(&mut self) -> bool {
        if self.edges.is_empty() {
            return false;
        }
        let i = self.rng.gen_range(0..self.edges.len());
        let e = *self.edges.get_index(i).unwrap().0;
        self.delete(e);
        true
    }

    fn reweight_random(&mut self) -> bool {
        if self.edges.is_empty() {
            return false;
        }
        let i = self.rng.gen_range(0..self.edges.len());
        let (e, old) = self.edges.get_index(i).map(|(&e, &x)| (e, x)).unwrap();
        let room = (self.slack(e.u()) + old).min(self.slack(e.v()) + old);
        let x = self.spec.weights.sample(&mut self.rng).min(room).max(0.0);
        self.edges[&e] = x;
        self.load[e.u()] += x - old;
        self.load[e.v()] += x - old;
        self.out.push(UpdateEvent::SetWeight { edge: e, weight: x });
        true
    }
}

/// Expand `spec` into events. The same spec always yields the same events.
pub fn generate(spec: &TraceSpec) -> Vec<UpdateEvent> {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        edges: IndexMap::new(),
        load: vec![0.0; spec.n],
        out: Vec::with_capacity(spec.length),
        spec: spec.clone(),
    };
    match spec.kind {
        StreamKind::RandomInsertDelete => {
            while g.out.len() < spec.length {
                let insert = g.edges.is_empty() || g.rng.gen_bool(0.55);
                if !(insert && g.try_insert()) && !g.delete_random() {
                    break;
                }
            }
        }
        StreamKind::Decremental => {
            let m = spec.length / 2;
            while g.edges.len() < m && g.try_insert() {}
            let inserted = g.edges.len();
            for _ in 0..inserted {
                g.delete_random();
            }
        }
        StreamKind::SlidingWindow => {
            let window = spec.window.unwrap_or(2 * spec.n).max(1);
            let mut order: VecDeque<Edge> = VecDeque::new();
            while g.out.len() < spec.length {
                if order.len() >= window || !g.try_insert() {
                    match order.pop_front() {
                        Some(e) => g.delete(e),
                        None => break,
                    }
                    continue;
                }
                if let Some(UpdateEvent::Insert { edge, .. }) = g.out.last() {
                    order.push_back(*edge);
                }
            }
        }
        StreamKind::WeightChurn => {
            let fill = spec.length / 4;
            while g.out.len() < fill && g.try_insert() {}
            while g.out.len() < spec.length {
                let r: f64 = g.rng.gen();
                let done = if r < 0.8 {
                    g.reweight_random()
                } else if r < 0.9 {
                    g.try_insert()
                } else {
                    g.delete_random()
                };
                if !done && !g.try_insert() && !g.delete_random() {
                    break;
                }
            }
        }
    }
    g.out
}
