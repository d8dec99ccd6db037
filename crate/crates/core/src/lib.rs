//! Search and verification kernels for exponential Ramsey patterns.
//!
//! The crate works on finite shadows of statements about partitions of the
//! naturals: exponential triples `(a, b, a^b)`, the finite-sums and
//! finite-products sets `FS`/`FP`, and their exponential analogues built by
//! iterating `y ↦ y^x` (type I) or `y ↦ x^y` (type II).
//!
//! * [`tower`]: exact arithmetic on values `root^exponent`.
//! * [`structures`]: FS, FP and the two exponential generators.
//! * [`triples`]: triple enumeration and exponentiation-closure hypergraphs.
//! * [`coloring`]: colorability solvers, DIMACS export, the coloring-rule DSL.
//! * [`ipsets`]: windowed set transforms, IP witnesses, progression detectors.
//! * [`greedy`]: finite constructions following the inductive arguments.

pub mod coloring;
pub mod error;
pub mod greedy;
pub mod ipsets;
pub mod structures;
pub mod tower;
pub mod triples;

pub use error::{Error, Result};
pub use tower::{Caps, ExplicitValue, PowerForm};
