//! Exact reference implementations used to check the sparsifiers.

pub mod analogous;
pub mod distance;
pub mod matching;
pub mod maximal;
pub mod orientation;

pub use analogous::{analogous_static_hierarchy, AnalogousStaticInput};
pub use distance::{dist_v, scale_down};
pub use matching::{
    max_fractional_matching, max_fractional_matching_weights, max_matching, max_matching_edges, MatchingResult,
};
pub use maximal::{first_unmaximal_edge, is_approximately_maximal};
pub use orientation::{out_degrees, verify_orientation};
