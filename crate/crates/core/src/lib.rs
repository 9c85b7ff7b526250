//! Cyclic partitions of complete graphs and their transitive orientations.
//!
//! A partition of the edges of `K_n` into `k` parts is described by a
//! [`DefiningSequence`]. The crate checks, constructs and searches for vertex
//! orderings whose tournament is carried part-to-part by the rotation
//! `i -> i + 1`.

pub mod analysis;
pub mod blowup;
pub mod constructions;
pub mod error;
pub mod io;
pub mod orient;
pub mod sequence;
pub mod solver;

pub use analysis::{Check, ConjectureReport, SweepOptions, SweepRecord};
pub use blowup::BlowUpWitness;
pub use constructions::OrientedDecomposition;
pub use error::{Error, Result};
pub use orient::{Bitonicity, OrientationReport, Verdict, VertexOrdering};
pub use sequence::{DefiningSequence, Label, PartitionLabeling, StepKind, Vertex};
pub use solver::{Budget, SolveOutcome, SolveStatus};
