//! Completely entangled subspaces of bipartite systems, the product vectors
//! orthogonal to them, and the optimal decomposable entanglement witnesses
//! built from them.

pub mod battery;
pub mod error;
pub mod families;
pub mod json;
pub mod linalg;
pub mod products;
pub mod rng;
pub mod search;
pub mod spanning;
pub mod subspace;
pub mod witness;

pub use error::{Error, Result};
pub use linalg::{CMat, CVec, ToleranceConfig, C64};
