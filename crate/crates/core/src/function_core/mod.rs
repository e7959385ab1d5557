//! Continuous functions on the extended real line and test functions.

pub mod chart;
pub mod continuous;
pub mod test_function;

pub use chart::{compactify, decompactify, CompactCoord, ExtendedReal};
pub use continuous::{build_continuous, evaluator, sup_norm, ContinuousFunctionBar, Evaluator, Extrema, DEFAULT_TOL};
pub use test_function::{bump, delta_sequence, TestFunction};
