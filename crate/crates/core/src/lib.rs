//! Lifting constructions for CNF formulas and the proof objects around them.
//!
//! The crate covers:
//!
//! * formulas, DIMACS I/O and hard-formula generators ([`cnf`], [`dimacs`],
//!   [`graph`], [`generate`]);
//! * the tensor and parity selector lifts ([`lifting`]);
//! * decision trees for functions and clause search ([`search`]);
//! * resolution proofs ([`resolution`]) and degree-k cutting planes
//!   ([`cp`]);
//! * a small simplex solver, the MAX-SAT relaxation and approximate degree
//!   ([`lp`]).
//!
//! Everything is deterministic; randomness is always drawn from a ChaCha8
//! stream seeded by an explicit `u64`.

pub mod brute;
pub mod cnf;
pub mod cp;
pub mod dimacs;
pub mod generate;
pub mod graph;
pub mod lifting;
pub mod lp;
pub mod resolution;
pub mod search;

pub use cnf::{all_assignments, eval_clause, Assignment, Clause, CnfError, CnfFormula, Literal};
pub use dimacs::{parse_dimacs, write_dimacs, DimacsError};
pub use graph::BipartiteGraph;
