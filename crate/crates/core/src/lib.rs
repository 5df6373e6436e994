//! Directed last- and first-passage percolation on `Z^d`, greedy lattice
//! animals, and Monte Carlo estimates of the limiting shape.

pub mod animals;
pub mod distributions;
pub mod error;
pub mod growth;
pub mod lattice;
pub mod passage;
pub mod quadrature;
pub mod rng;
pub mod shape;

pub use distributions::{DistributionSpec, MomentSummary};
pub use error::{Error, Result};
pub use lattice::{LatticeBox, Mode, PassageField, WeightField};
