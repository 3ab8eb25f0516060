//! Solver suite for the Collapsed k-Core Problem: find the b nodes whose
//! removal leaves the smallest k-core.
//!
//! The crate provides the combinatorial machinery (k-core decomposition,
//! cascade simulation, follower sets), valid inequalities with exact
//! rational coefficients, three exact solvers (brute force, branch and
//! bound, cutting plane over the sparse master), an LP formulation of
//! k-core detection with an embedded simplex solver and its dual, and
//! emitters that write the optimization models as solver-ready `.lp` files.

pub mod bounds;
pub mod cascade;
pub mod cuts;
pub mod error;
pub mod graph;
pub mod lp;
pub mod lp_format;
pub mod model;
pub mod report;
pub mod simplex;
pub mod solver;

pub use error::{Error, Result};
