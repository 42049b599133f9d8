//! Deterministic dynamic rounding of fractional matchings.
//!
//! Given a dynamic graph and a fractional matching on it, [`GeneralSparsifier`]
//! maintains a subgraph `S` of bounded arboricity together with a certificate
//! fractional matching `phi` on `S` whose size tracks the input matching.
//! Arbitrary weights are discretized into geometric classes; each class is a
//! uniform fractional matching handled by its own [`UniformSparsifier`], which
//! repeatedly peels low-degree nodes and halves the remaining degrees with
//! [`degree_split`](degree_split::degree_split).
//!
//! The [`oracles`] module holds exact reference implementations (blossom
//! matching, fractional matching via the bipartite double cover, the weight
//! distance and scale-down construction, and the static hierarchy that the
//! dynamic one must always equal). [`harness`] generates and replays update
//! traces.

pub mod degree_split;
pub mod error;
pub mod general;
pub mod graph;
pub mod harness;
pub mod num;
pub mod oracles;
pub mod trace;
pub mod uniform;
pub mod weights;

pub use error::{GraphError, OracleError, ParamError, SparsifyError, TraceError};
pub use general::{Discretization, GeneralSparsifier, LevelAssignment};
pub use graph::{apply_event, DynGraph, Edge, NodeId, UpdateEvent};
pub use num::Scalar;
pub use uniform::{Hierarchy, Metrics, Mode, Params, UniformSparsifier};
pub use weights::Weights;

/// Weight function in double precision, the type used by the sparsifiers.
pub type WeightFn = Weights<f64>;
/// Weight function in single precision.
pub type WeightFn32 = Weights<f32>;
/// Weight function in exact rational arithmetic.
pub type ExactWeightFn = Weights<num_rational::Rational64>;
