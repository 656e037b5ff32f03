//! Linear recurrence systems over arbitrary semirings, the weighted
//! one-letter automata that generate them, and truncated z-transform
//! series of their solutions.
//!
//! A system f(n+1) = A(n)·f(n) ⊕ g(n) with weights in a semiring can be
//! iterated directly or solved in closed form by discrete convolution;
//! the z-transform of the solution then admits an equivalent factored
//! series through a kernel series, and this crate checks those
//! identities mechanically, coefficient by coefficient, with exact
//! carrier arithmetic throughout (arbitrary-precision integers, symbolic
//! infinities, no floating point).
//!
//! The `examples/` directory is the front door; each example is a
//! runnable walkthrough of one capability:
//!
//! - `semiring_laws` — builtin semirings and the exhaustive law checker
//! - `solve_system` — iterating vs closed-form solving a single system
//! - `compose_systems` — composing two systems and solving f from h
//! - `z_transform` — solution series, S-series, direct vs theorem form
//! - `verify_theorems` — seeded bulk verification across semirings
//! - `automaton_paths` — path enumeration and path-weight semantics
//! - `tropical_walks` — shortest walks via min-plus matrix algebra
//! - `convert_files` — system ↔ automaton document conversion
//!
//! ```bash
//! cargo run -p zrec --example compose_systems
//! ```
//!
//! The same functionality is scriptable through the thin `zrec` binary
//! (`solve`, `transform`, `verify`, `paths`, `convert`, `laws`,
//! `semirings`); see the README for the file formats.

pub mod automata;
pub mod cli;
pub mod files;
pub mod generate;
pub mod laws;
pub mod linalg;
pub mod semiring;
pub mod seq;
pub mod solver;
pub mod ztransform;

pub use linalg::{Matrix, Vector};
pub use semiring::{Builtin, Semiring};
pub use seq::{Seq, SeqSpec};
pub use solver::{ComposedSystem, RecurrenceSystem};
pub use ztransform::{Problem, TheoremKind, TruncatedSeries};
