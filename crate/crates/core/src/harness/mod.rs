//! Trace generation, replay with checks, and scaling measurements.

pub mod approx;
pub mod bench;
pub mod runner;
pub mod tracegen;

pub use approx::{gen_approx_maximal, Strategy};
pub use bench::{scaling, BenchConfig, BenchReport, Growth, ScalingRow};
pub use runner::{run, CheckSummary, Checks, RunConfig, RunError, RunReport, Target};
pub use tracegen::{generate, StreamKind, TraceSpec, WeightDist};
