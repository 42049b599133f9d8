use crate::error::OracleError;
use crate::graph::{Edge, NodeId};
use crate::uniform::Orientation;

/// Out-degree of every node in `[0, n)` under `dir`.
pub fn out_degrees(n: usize, dir: &Orientation) -> Vec<usize> {
    let mut out = vec![0; n];
    for &tail in dir.values() {
        out[tail] += 1;
    }
    out
}

/// Check that `dir` orients every edge of `edges` and that each node's
/// out-degree is at most `bound_low` below level `top` and `bound_high` at
/// `top`.
pub fn verify_orientation<I: IntoIterator<Item = Edge>>(
    edges: I,
    dir: &Orientation,
    bound_low: usize,
    bound_high: usize,
    levels: &[usize],
    top: usize,
) -> Result<bool, OracleError> {
    let mut out = vec![0usize; levels.len()];
    for e in edges {
        let tail: NodeId = *dir.get(&e).ok_or(OracleError::MissingDirection(e))?;
        if !e.touches(tail) {
            return Err(OracleError::BadDirection { edge: e, tail });
        }
        out[tail] += 1;
    }
    Ok(out.iter().zip(levels).all(|(&d, &l)| d <= if l < top { bound_low } else { bound_high }))
}
