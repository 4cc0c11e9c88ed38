//! Exact-arithmetic workbench for rooted-tree combinatorics: plane trees and
//! unordered shapes with their classical statistics, truncated power series
//! over rationals, weighted tree sums and the differential equations their
//! generating functions satisfy, Dyck-path and chord-diagram bijections,
//! Monte Carlo cross-checks of matrix-trace limits, and moments of a
//! triangular-kernel operator family.
//!
//! Everything that can be exact is exact (`num::BigRational` throughout);
//! floating point appears only in the Monte Carlo sampler and its
//! comparisons against exact limits.

pub mod bare;
pub mod bijections;
pub mod cli;
pub mod error;
pub mod rational;
pub mod report;
pub mod series;
pub mod trees;
pub mod triangular;
pub mod wigner;

pub use error::{Error, Result};
