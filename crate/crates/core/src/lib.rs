//! Hierarchical optimistic optimization (HOO) for stochastic bandits whose
//! arms form the unit cube `[0,1]^D`.
//!
//! The crate is organised around the pieces of the method:
//!
//! - [`env`]: environments (mean-payoff function, `f*`, Bernoulli rewards);
//! - [`partition`]: the dyadic tree of coverings and its shrinking parameters;
//! - [`hoo`]: the basic strategy, its tree and statistics;
//! - [`variants`]: truncated HOO, z-HOO and local-HOO;
//! - [`analysis`]: regret accounting, packing numbers and assumption checks;
//! - [`harness`]: seeded, replicated experiments and their exports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod arm;
pub mod dissimilarity;
pub mod env;
pub mod error;
pub mod harness;
pub mod hoo;
pub mod partition;
pub mod rng;
pub mod variants;

pub use arm::ArmPoint;
pub use dissimilarity::{Dissimilarity, Norm};
pub use env::{EnvNorm, EnvSpec, Environment};
pub use error::{Error, Result};
pub use hoo::{HooConfig, HooTree, NodeStats, PlayRecord, Selection, Strategy};
pub use partition::{CoverTree, NodeId, PartitionParams, Region};
pub use rng::RngStream;
pub use variants::{LocalHoo, RegimeSchedule, StrategyKind, TruncatedHoo, ZHoo};
