//! Node-wise distance between weight functions, and the scale-down that
//! turns a close weight function into one dominated by the other.

use crate::num::Scalar;
use crate::weights::Weights;

/// `sum_v |w1(v) - w2(v)|`.
pub fn dist_v<S: Scalar>(w1: &Weights<S>, w2: &Weights<S>) -> S {
    assert_eq!(w1.node_count(), w2.node_count(), "weight functions over different node sets");
    S::sum_iter((0..w1.node_count()).map(|v| (w1.node_weight(v) - w2.node_weight(v)).abs()))
}

/// Scaling factor `max(1, w1(x) / w2(x))` at node `x`, or `None` when
/// `w2(x) = 0 < w1(x)`, where the only admissible weight is zero.
fn node_factor<S: Scalar>(w1: &Weights<S>, w2: &Weights<S>, x: usize) -> Option<S> {
    let (a, b) = (w1.node_weight(x), w2.node_weight(x));
    if a <= S::zero() {
        Some(S::one())
    } else if b <= S::zero() {
        None
    } else {
        Some(S::one().max_of(a / b))
    }
}

/// `w~(u, v) = w1(u, v) / max(1, w1(u)/w2(u), w1(v)/w2(v))` on the support of
/// `w1`.
///
/// Then `w~ <= w1` edgewise and `w~(v) <= w2(v)` at every node. A node with
/// `w1(x) = 0` contributes a factor of 1; an edge at a node with
/// `w2(x) = 0 < w1(x)` gets weight zero and leaves the support.
pub fn scale_down<S: Scalar>(w1: &Weights<S>, w2: &Weights<S>) -> Weights<S> {
    assert_eq!(w1.node_count(), w2.node_count(), "weight functions over different node sets");
    let n = w1.node_count();
    let factors: Vec<Option<S>> = (0..n).map(|x| node_factor(w1, w2, x)).collect();
    let pairs = w1.iter().filter_map(|(e, x)| {
        let fu = factors[e.u()]?;
        let fv = factors[e.v()]?;
        Some((e, x / fu.max_of(fv)))
    });
    Weights::from_pairs(n, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use num_traits::Signed;
    use num_rational::Rational64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e(a: usize, b: usize) -> Edge {
        Edge::new(a, b)
    }

    fn r(a: i64, b: i64) -> Rational64 {
        Rational64::new(a, b)
    }

    #[test]
    fn identical_inputs() {
        let w = Weights::from_pairs(4, [(e(0, 1), r(1, 3)), (e(1, 2), r(1, 2))]);
        assert_eq!(dist_v(&w, &w), r(0, 1));
        assert_eq!(scale_down(&w, &w), w);
    }

    #[test]
    fn dominated_distance_is_twice_size_gap() {
        let small = Weights::from_pairs(4, [(e(0, 1), r(1, 4))]);
        let big = Weights::from_pairs(4, [(e(0, 1), r(1, 2)), (e(2, 3), r(1, 3))]);
        assert_eq!(dist_v(&small, &big), r(2, 1) * (big.size() - small.size()));
    }

    #[test]
    fn one_overloaded_node_halves_its_edges() {
        let w1 = Weights::from_pairs(4, [(e(0, 1), r(1, 2)), (e(0, 2), r(1, 2))]);
        let w2 = Weights::from_pairs(4, [(e(0, 1), r(1, 2)), (e(0, 3), r(0, 1))]);
        // w1(0) = 1 = 2 * w2(0); w1(1) = w2(1); node 2 is absent from w2
        let w3 = Weights::from_pairs(4, [(e(0, 1), r(1, 2)), (e(2, 3), r(1, 2))]);
        let out = scale_down(&w1, &w3);
        assert_eq!(out.get(e(0, 1)), r(1, 4));
        assert_eq!(out.get(e(0, 2)), r(1, 4));
        // node 2 carries no w2 weight, so its edge vanishes
        let gone = scale_down(&w1, &w2);
        assert_eq!(gone.get(e(0, 2)), r(0, 1));
        assert!(gone.node_weight(0) <= w2.node_weight(0));
    }

    #[test]
    fn random_pairs_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = rng.gen_range(2..10);
            let mut pairs1 = Vec::new();
            let mut pairs2 = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    if rng.gen_bool(0.4) {
                        pairs1.push((e(a, b), r(rng.gen_range(1..6), 20)));
                    }
                    if rng.gen_bool(0.4) {
                        pairs2.push((e(a, b), r(rng.gen_range(1..6), 20)));
                    }
                }
            }
            let w1 = Weights::from_pairs(n, pairs1);
            let w2 = Weights::from_pairs(n, pairs2);
            let w3 = scale_down(&w1, &w2);
            for (x, y) in w3.iter() {
                assert!(y <= w1.get(x));
            }
            for v in 0..n {
                assert!(w3.node_weight(v) <= w2.node_weight(v));
            }
            let w0 = Weights::<Rational64>::new(n);
            assert!(dist_v(&w1, &w2) <= dist_v(&w1, &w0) + dist_v(&w0, &w2));
            assert!(dist_v(&w1, &w2) >= r(2, 1) * (w1.size() - w2.size()).abs());
        }
    }
}
