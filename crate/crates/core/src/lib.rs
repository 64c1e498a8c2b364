//! Resistance distances and Kirchhoff indices of the iteratively grown
//! simplicial network family.
//!
//! * [`graph`] builds the networks and evaluates their counting formulas.
//! * [`oracle`] computes exact (and float) resistances from Laplacian
//!   {1}-inverses and checks the block identities.
//! * [`recursion`] computes resistances from the network genealogy alone.
//! * [`indices`] evaluates the closed-form indices and cross-checks them.
//! * [`verify`] bundles every check into a reportable suite.

pub mod cli;
pub mod error;
pub mod graph;
pub mod indices;
pub mod oracle;
pub mod parallel;
pub mod recursion;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{build_network, NodeRecord, SimplicialNetwork};
pub use parallel::Execution;
pub use scalar::Exact;
