//! Spectral and combinatorial tools for finite regular graphs.
//!
//! Graphs are Serre graphs: every directed edge has a reverse, and an edge that
//! is its own reverse is a half-loop. The crate computes the spectral radius of
//! the random walk operator, counts closed and non-backtracking cycles, samples
//! walks that reduce to the empty word, and checks explicit upper bounds on
//! return counts against exact tree-walk tables.
//!
//! ```
//! use ramkit::families;
//! use ramkit::spectral::markov_spectrum;
//!
//! let s = markov_spectrum(&families::complete(4)).unwrap();
//! assert!((s.rho - 1.0 / 3.0).abs() < 1e-9);
//! ```
//!
//! The guide in `book/` walks through each module.

pub mod bounds;
pub mod census;
pub mod error;
pub mod families;
pub mod fungroup;
pub mod graph;
pub mod groups;
pub mod limits;
pub mod linalg;
pub mod nullcycle;
pub mod parallel;
pub mod pattern;
pub mod percolation;
pub mod report;
pub mod sgf;
pub mod spectral;
pub mod treewalk;
