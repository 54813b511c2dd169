//! Symbolic dynamics for topological Markov shifts and flows.
//!
//! The crate builds shifts from finite directed graphs, computes equilibrium
//! measures through the Ruelle operator, evaluates Bowen–Marcus cocycles
//! along su-loops, classifies suspension flows as Bernoulli or Bernoulli
//! times a rotation, and provides the partition, d-bar and mixing tools used
//! to probe the Bernoulli property empirically.

pub mod error;
pub mod scalar;
pub mod shift;

pub use error::{Error, Result};
pub mod thermo;
pub mod suspension;
pub mod cocycle;
pub mod mixing;
pub mod cli;
