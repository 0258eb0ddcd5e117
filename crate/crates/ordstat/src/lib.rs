//! Deterministic selection (the i-th smallest of n keys) built around
//! median-of-medians pivots over small groups, instrumented so that every
//! comparison is counted and every partition iteration leaves a checkable
//! trace.
//!
//! The variants:
//!
//! * `classic{3,4,5}`: grouped SELECT with one medians pass; group 5 is the
//!   reference linear algorithm, groups 3 and 4 exist for the growth probe.
//! * `repeated3`, `repeated4`: the "group and take medians" step applied
//!   twice before the pivot recursion.
//! * `shifting4`: groups of 4, switching between lower and upper medians on
//!   the position of the current target.
//! * `hybrid4`: two passes over groups of 4, lower medians then upper.
//! * `oracle` (full sort) and `random` (seeded quickselect) as baselines.
//!
//! Each variant's per-iteration discard guarantee is registered in
//! [`instrument`] as a floor-exact predicate and enforced on live traces by
//! the verification and experiment runners.

pub mod algorithms;
pub mod error;
pub mod experiments;
pub mod generators;
pub mod instrument;
pub mod numeric;
pub mod primitives;
pub mod rng;
pub mod verify;

pub use algorithms::{run, AlgorithmId, SelectionRequest};
pub use error::{Error, Result};
pub use generators::{generate, GeneratorKind, GeneratorSpec};
pub use instrument::{RunReport, TraceEvent};
pub use primitives::{ComparisonCounter, Element, MedianPolicy, Sequence};
