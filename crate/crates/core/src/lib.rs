//! Property checking for semi-decompositions and semigroup actions.
//!
//! Two backends share one vocabulary. Finite topological spaces are stored as
//! specialization pre-orders and every property is decided exactly. Sampled
//! metric spaces carry a ladder of scales and every verdict is stated at a
//! scale, together with the data that produced it.

pub mod actions;
pub mod catalog;
pub mod error;
pub mod instance;
pub mod miner;
pub mod pointset;
pub mod props;
pub mod semidec;
pub mod spaces;

pub use error::{Error, Result};
pub use pointset::PointSet;
