//! Exact pattern-complexity calculus for two-dimensional symbolic
//! configurations over convex lattice regions.

pub mod catalog;
pub mod cli;
pub mod complexity;
pub mod config;
pub mod entropy;
pub mod error;
pub mod expansivity;
pub mod extension;
pub mod geometry;
pub mod periodicity;

pub use error::{LatticeError, Result};
