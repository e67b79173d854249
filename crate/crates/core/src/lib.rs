//! Partition vertex cover solver.
//!
//! Pick a minimum-cost vertex set that covers, for every edge group, at least
//! the group's target weight. The pipeline is:
//!
//! 1. [`pvclp::solve_pvclp`] solves the knapsack-cover strengthened LP
//!    relaxation with a cutting-plane loop over the [`lp`] simplex kernel;
//! 2. [`rounding::solve_rounded`] repeats threshold rounding
//!    `c·⌈log2(r + 1)⌉` times and returns the union of the picks.
//!
//! [`exact`] and [`greedy`] provide the reference optimum and a baseline;
//! [`bench`] runs seeded experiments and writes CSV.

pub mod bench;
pub mod exact;
pub mod greedy;
pub mod instance;
pub mod lp;
pub mod pvclp;
pub mod report;
pub mod rounding;

pub use instance::{Edge, Instance, SetCoverInstance, VertexSet};
