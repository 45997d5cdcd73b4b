//! Simulator and verification engine for catalytic Turing machines.
//!
//! The crate models machines whose auxiliary tape starts full of arbitrary
//! data that must be restored before halting, builds their configuration
//! graphs, and implements the compress-or-compute reduction that converts
//! nondeterministic and randomized catalytic computations into deterministic
//! ones with a single graph query, all within a verified space budget.

pub mod bits;
pub mod coc;
pub mod confgraph;
pub mod corpus;
pub mod dot;
pub mod machine;
pub mod meter;
pub mod oracle;
pub mod verify;
