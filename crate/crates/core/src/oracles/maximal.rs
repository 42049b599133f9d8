use crate::graph::{DynGraph, Edge, NodeId};
use crate::num::Scalar;
use crate::weights::Weights;

/// Node `x` is saturated (`w(x) >= 1 - alpha`) and all of its edges in `g`
/// are light (`< beta`).
fn saturated_light<S: Scalar>(w: &Weights<S>, g: &DynGraph, x: NodeId, alpha: S, beta: S) -> bool {
    (S::one() - alpha).le_tol(w.node_weight(x)) && g.neighbors(x).all(|y| w.get(Edge::new(x, y)) < beta)
}

/// Whether `w` is an `(alpha, beta)`-approximately maximal fractional
/// matching in `g`: every edge is heavy (`>= beta`) or has an endpoint that
/// is saturated and carries only light edges.
pub fn is_approximately_maximal<S: Scalar>(w: &Weights<S>, g: &DynGraph, alpha: S, beta: S) -> bool {
    first_unmaximal_edge(w, g, alpha, beta).is_none()
}

/// An edge violating approximate maximality, if any.
pub fn first_unmaximal_edge<S: Scalar>(w: &Weights<S>, g: &DynGraph, alpha: S, beta: S) -> Option<Edge> {
    let mut light_ok = vec![None; g.node_count()];
    let mut ok_at = |x: NodeId| *light_ok[x].get_or_insert_with(|| saturated_light(w, g, x, alpha, beta));
    g.sorted_edges().into_iter().find(|&e| !(beta.le_tol(w.get(e)) || ok_at(e.u()) || ok_at(e.v())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(a: NodeId, b: NodeId) -> Edge {
        Edge::new(a, b)
    }

    #[test]
    fn heavy_everywhere() {
        let g = DynGraph::from_edges(4, [e(0, 1), e(2, 3), e(1, 2)]).unwrap();
        let w = Weights::uniform(4, g.edges(), 0.3);
        assert!(is_approximately_maximal(&w, &g, 0.0, 0.3));
    }

    #[test]
    fn lone_light_edge() {
        let g = DynGraph::from_edges(2, [e(0, 1)]).unwrap();
        let w = Weights::uniform(2, g.edges(), 0.05);
        assert!(!is_approximately_maximal(&w, &g, 0.5, 0.1));
        assert_eq!(first_unmaximal_edge(&w, &g, 0.5, 0.1), Some(e(0, 1)));
    }

    #[test]
    fn saturated_star_center() {
        let g = DynGraph::from_edges(11, (1..11).map(|i| e(0, i))).unwrap();
        let w = Weights::uniform(11, g.edges(), 0.1);
        assert!(is_approximately_maximal(&w, &g, 0.0, 0.2));
        // one heavy edge at the center disqualifies it
        let mut w2 = w.clone();
        w2.set(e(0, 1), 0.2);
        w2.set(e(0, 2), 0.0);
        assert!(!is_approximately_maximal(&w2, &g, 0.0, 0.2));
    }
}
