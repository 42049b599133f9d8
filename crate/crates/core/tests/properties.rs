mod common;

use std::collections::BTreeSet;

use dynsparsify::degree_split::degree_split;
use dynsparsify::oracles::analogous::analogous_static_hierarchy;
use dynsparsify::oracles::distance::{dist_v, scale_down};
use dynsparsify::oracles::matching::{max_fractional_matching_weights, max_matching_edges};
use dynsparsify::trace::{format_event, parse_str};
use dynsparsify::{DynGraph, Edge, GeneralSparsifier, LevelAssignment, Params, UniformSparsifier, UpdateEvent, Weights};
use num_rational::Rational64;
use proptest::prelude::*;

fn edge_set(n: usize, max: usize) -> impl Strategy<Value = Vec<Edge>> {
    prop::collection::btree_set((0..n, 0..n), 0..max).prop_map(|pairs| {
        let set: BTreeSet<Edge> = pairs.into_iter().filter(|(a, b)| a != b).map(|(a, b)| Edge::new(a, b)).collect();
        set.into_iter().collect()
    })
}

/// Toggle a pair per step: insert it if absent and both degrees allow, else delete it.
fn toggles(n: usize, cap: usize, steps: Vec<(usize, usize)>) -> Vec<UpdateEvent> {
    let mut g = DynGraph::new(n);
    let mut out = Vec::new();
    for (a, b) in steps {
        if a == b {
            continue;
        }
        let e = Edge::new(a, b);
        if g.contains(e) {
            g.remove(e).unwrap();
            out.push(UpdateEvent::Delete { edge: e });
        } else if g.degree(a) < cap && g.degree(b) < cap {
            g.insert(e).unwrap();
            out.push(UpdateEvent::Insert { edge: e, weight: 0.0 });
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn degree_split_stays_in_window(edges in edge_set(30, 200)) {
        let half = degree_split(&edges);
        let d1 = common::degrees(30, edges.iter().copied());
        let d2 = common::degrees(30, half.iter().copied());
        for v in 0..30 {
            prop_assert!(2 * d2[v] + 2 >= d1[v] && 2 * d2[v] <= d1[v] + 2);
        }
        let input: BTreeSet<Edge> = edges.iter().copied().collect();
        prop_assert!(half.iter().all(|e| input.contains(e)));
    }

    #[test]
    fn uniform_stream_keeps_invariants_and_static_equivalence(
        steps in prop::collection::vec((0usize..16, 0usize..16), 0..300),
        eps in prop::sample::select(vec![0.1, 0.2, 0.3]),
    ) {
        let p = Params::experiment(16, eps, 0.2, 0.025).unwrap();
        let mut s = UniformSparsifier::new(p).unwrap();
        for ev in toggles(16, 15, steps) {
            match ev {
                UpdateEvent::Insert { edge, .. } => { s.handle_insertion(edge).unwrap(); }
                UpdateEvent::Delete { edge } => { s.handle_deletion(edge).unwrap(); }
                UpdateEvent::SetWeight { .. } => unreachable!(),
            }
            let report = s.check_invariants();
            prop_assert!(report.all_passed(), "{:?}", report.failures().collect::<Vec<_>>());
            let want = analogous_static_hierarchy(&s.analogous_input());
            prop_assert_eq!(s.snapshot(), want);
        }
    }

    #[test]
    fn general_rounding_and_certificate(
        ops in prop::collection::vec((0usize..12, 0usize..12, 0.0f64..1.0), 0..200),
    ) {
        let n = 12;
        let mut g = GeneralSparsifier::new(n, 0.2, 0.2).unwrap();
        let mut w: Weights<f64> = Weights::new(n);
        for (a, b, x) in ops {
            if a == b {
                continue;
            }
            let e = Edge::new(a, b);
            let old = w.get(e);
            // largest weight that keeps both endpoints at most 1
            let room = (1.0 - w.node_weight(a) + old).min(1.0 - w.node_weight(b) + old).max(0.0);
            let ev = if w.contains(e) && x < 0.3 {
                UpdateEvent::Delete { edge: e }
            } else if w.contains(e) {
                UpdateEvent::SetWeight { edge: e, weight: (x * room).min(1.0) }
            } else {
                UpdateEvent::Insert { edge: e, weight: (x * room).min(1.0) }
            };
            match ev {
                UpdateEvent::Delete { edge } => { w.remove(edge); }
                UpdateEvent::Insert { edge, weight } | UpdateEvent::SetWeight { edge, weight } => w.set(edge, weight),
            }
            g.apply_update(&ev).unwrap();

            let w_hat: Weights<f64> = g.w_hat();
            for (e, x) in g.weights().iter() {
                let h = w_hat.get(e);
                if g.class_of(e) == Some(LevelAssignment::Heavy) {
                    prop_assert_eq!(h, x);
                } else {
                    prop_assert!(h <= x && x <= 1.2 * h + 0.2 / 144.0 + 1e-9);
                }
            }
            let phi: Weights<f64> = g.phi();
            prop_assert!(phi.is_fractional_matching());
            for v in 0..n {
                prop_assert!(phi.node_weight(v) <= w_hat.node_weight(v) + 1e-9);
            }
            let report = g.check_invariants();
            prop_assert!(report.all_passed(), "{:?}", report.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn scale_down_stays_below_both(
        pairs in prop::collection::vec((0usize..8, 0usize..8, 1i64..8, 1i64..8), 0..20),
    ) {
        let mut w1: Weights<Rational64> = Weights::new(8);
        let mut w2: Weights<Rational64> = Weights::new(8);
        for (a, b, x, y) in pairs {
            if a == b {
                continue;
            }
            w1.set(Edge::new(a, b), Rational64::new(x, 64));
            w2.set(Edge::new(a, b), Rational64::new(y, 64));
        }
        let h = scale_down(&w1, &w2);
        for v in 0..8 {
            prop_assert!(h.node_weight(v) <= w2.node_weight(v));
        }
        for (e, x) in h.iter() {
            prop_assert!(x <= w1.get(e));
        }
        prop_assert!(dist_v(&w1, &w2) >= Rational64::from_integer(0));
    }

    #[test]
    fn fractional_matching_brackets_integral(edges in edge_set(10, 30)) {
        let m = max_matching_edges(10, &edges).size() as f64;
        let f = max_fractional_matching_weights(10, &edges).size();
        prop_assert!(m <= f && f <= 1.5 * m);
        prop_assert_eq!(f, common::brute_half_integral(10, &edges));
    }

    #[test]
    fn trace_text_round_trips(
        evs in prop::collection::vec((0usize..50, 1usize..50, 0u8..3, 0.0f64..=1.0), 0..40),
    ) {
        let evs: Vec<UpdateEvent> = evs
            .into_iter()
            .map(|(a, d, k, x)| {
                let e = Edge::new(a, a + d);
                match k {
                    0 => UpdateEvent::Insert { edge: e, weight: x },
                    1 => UpdateEvent::Delete { edge: e },
                    _ => UpdateEvent::SetWeight { edge: e, weight: x },
                }
            })
            .collect();
        let text: String = evs.iter().map(|e| format_event(e) + "\n").collect();
        prop_assert_eq!(parse_str(&text).unwrap(), evs);
    }
}
