//! Exact solvers for induced-matching counting and maximum acyclic matching
//! over clique-width expressions, plus reference oracles and hardness-gadget
//! instance generators.

pub mod acyclic;
pub mod convolution;
pub mod cwexpr;
pub mod error;
pub mod gadgets;
pub mod graph;
pub mod induced;
pub mod oracle;
pub mod partition;
pub mod stats;

pub use error::{Error, Result};
