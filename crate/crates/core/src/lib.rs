//! Resource provisioning for service function chains on multi-access edge
//! computing nodes.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the
//! numerical core: the infrastructure model and its feasibility rules, the
//! end-to-end delay model, a discrete-time mean-field game over
//! `(node, VNF)` states, a tabular actor-critic learner for the equivalent
//! MDP, a genetic-algorithm baseline and an exhaustive oracle. File formats,
//! CSV output and the command-line harness live in the `sfcmec` crate.
#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
mod math;

pub mod delay;
pub mod ga;
pub mod learner;
pub mod mfg;
pub mod oracle;
pub mod scenario;
pub mod topology;
pub mod workload;

pub use error::{Error, Result};
pub use topology::{
    ChainId, FeasibilityMode, LinkCapacitySet, MecNode, NodeId, PlacementMatrix, ResourceVector,
    ServiceChain, Topology, VnfId, VnfSpec,
};
