pub mod bases;
pub mod error;
pub mod fiber;
pub mod fixtures;
pub mod fourti2;
pub mod lattice;
pub mod mass;
pub mod matrix;
pub mod models;
pub mod moves;
pub mod sampler;
pub mod scalar;
pub mod summary;

pub use error::{Error, Result};
pub use fiber::{ConnectivityReport, Fiber};
pub use matrix::{Fingerprint, Matrix};
pub use moves::{MoveSet, Provenance};
pub use scalar::LatticeInt;

/// Configuration matrices, fibers and samplers use 64-bit entries.
pub type IntMatrix = Matrix<i64>;
pub type IntVector = Vec<i64>;
pub type IntMoveSet = MoveSet<i64>;
pub type IntFiber = Fiber<i64>;
