//! Graph-TSP approximation toolkit for cubic graphs.
//!
//! The bipartite pipeline contracts potential 4-cycles, builds a 2-factor
//! from a perfect matching, locally improves a second 2-factor until every
//! cycle of the first meets a long cycle of the second, certifies the
//! resulting component bound with exact rational weights, and converts the
//! better factor into a tour of length at most `5n/4 - 2`.
//!
//! For general cubic graphs, the crate ships the chorded-4-cycle gadget
//! machinery (detection, contraction, parity-based uncontraction of tour
//! multigraphs) and the exact arithmetic combining the two per-node bounds
//! into the `4/3 - 1/8754` coefficient.
//!
//! Brute-force oracles (2-factor enumeration, minimum cycle cover, exact
//! TSP) provide independent ground truth at small scale; seeded generators
//! and the published 48-node tight instance anchor the test suites.

pub mod batch;
pub mod certify;
pub mod cubic3;
pub mod error;
pub mod factor;
pub mod gen;
pub mod graph;
pub mod improve;
pub mod oracle;
pub mod rational;
pub mod reduce4;
pub mod tour;

pub use error::{Error, Result};
